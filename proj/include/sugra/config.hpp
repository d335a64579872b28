#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "sugra/clifford.hpp"
#include "sugra/jetfield.hpp"

namespace sugra {

// Generator budget for randomized configurations.  Generator 0 of the
// Grassmann algebra is reserved as the odd shift parameter used by the
// square-of-the-vector-field machinery and never appears in sampled data.
struct SamplerOptions {
  int jet_order = 2;
  std::vector<int> fermion_pool{1, 2, 3, 4, 5};   // gravitino components
  std::vector<int> ghost_pool{6, 7, 8};           // supersymmetry ghost
  std::vector<int> anti_pool{9, 10, 11};          // antifields and diffeo/rotation ghosts
  // Denominator bound for the bounded rational perturbation of the coframe
  // around the identity.
  long frame_pert_den = 4;
};

// A full point configuration of the theory: all fields, ghosts and
// (reparametrized) antifields as finite jets at a point, together with
// derived frame data.
struct BVConfig {
  int jet_order = 2;

  // fields (ghost number 0)
  Field e;                     // coframe, (1,1), even coefficients
  Field omega;                 // connection, (1,2), even coefficients
  Field psi;                   // gravitino, (1,0) column spinor, odd coefficients

  // ghosts (ghost number +1)
  std::array<Field, 4> xi;     // vector field components, odd scalar jets
  Field c;                     // rotation ghost, (0,2), odd coefficients
  Field chi;                   // supersymmetry ghost, (0,0) column spinor,
                               // even nilpotent coefficients

  // reparametrized antifields
  Field omega_check;           // (2,1), odd coefficients   (omega-dagger = e * this)
  Field c_check;               // (2,0), odd coefficients   (c-dagger = e^2/2 * this)
  Field psi0_dag;              // (1,0) column spinor, even coefficients
  Field e_dag;                 // (3,3), odd coefficients
  std::array<Field, 4> xi_dag; // covector slot of the diffeo-ghost antifield;
                               // each component (4,4), even coefficients
  Field chi0_dag;              // (0,0) column spinor, odd coefficients
                               // (chi-dagger = e^4/4! * this)

  // derived data (filled by finalize())
  JetMatrix frame;             // frame[a][mu] = e^a_mu
  JetMatrix einv;              // einv[mu][a] = e^mu_a
  Field gamma_und;             // [e, gamma] = gamma_mu dx^mu
  Field psi_dag;               // (1/3!) e gamma^3 gamma_und psi0_dag
  std::array<Field, 4> phi;    // phi^mu = bar(chi) gamma^a chi e^mu_a

  // Recompute frame data and derived composites from the primary entries.
  void finalize(const GammaRep& rep);
};

// Dirac adjoint of a column-spinor-valued field: a row-spinor field with
// components (bar psi)_c = sum_r psi_r C_rc.
Field bar_field(const GammaRep& rep, const Field& psi);

// Random scalar jet whose coefficients all have the given parity; bodies are
// bounded rationals, souls are quadratic/linear in the pool generators.
Field sample_scalar_jet(int parity, const std::vector<int>& pool,
                        std::mt19937_64& rng, int jet_order,
                        bool nilpotent = false);

// Random homogeneous (i,j)-form field with scalar spin factor.
Field sample_form_field(int i, int j, int parity, const std::vector<int>& pool,
                        std::mt19937_64& rng, int jet_order,
                        bool nilpotent = false);

// Random Majorana column-spinor valued (i,0)-form.
Field sample_spinor_form(const GammaRep& rep, int i, int parity,
                         const std::vector<int>& pool, std::mt19937_64& rng,
                         int jet_order, bool nilpotent = false);

// Full random configuration (deterministic in the seed).
BVConfig sample_config(const GammaRep& rep, std::uint64_t seed,
                       const SamplerOptions& opt = SamplerOptions());

// Degenerate configuration with the fermionic sector and supersymmetry ghost
// switched off (pure gravity limit).
BVConfig sample_config_pure_gravity(const GammaRep& rep, std::uint64_t seed,
                                    const SamplerOptions& opt = SamplerOptions());

// JSON round-trip of the primary entries (derived data is recomputed on load).
std::string dump_config(const BVConfig& cfg);
BVConfig load_config(const std::string& json_text, const GammaRep& rep);

}  // namespace sugra
