#include "sugra/config.hpp"

#include <bit>

#include "json.hpp"

namespace sugra {

namespace {

using nlohmann::json;

GaussianRational bounded_coeff(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> d(-3, 3);
  return GaussianRational(rat(d(rng)), rat(d(rng), 2));
}

Grassmann sample_coeff(int parity, const std::vector<int>& pool,
                       std::mt19937_64& rng, bool nilpotent) {
  std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
  Grassmann g;
  if (parity == 0) {
    if (!nilpotent) g += Grassmann(bounded_coeff(rng));
    for (int t = 0; t < 2; ++t) {
      int a = pool[pick(rng)], b = pool[pick(rng)];
      if (a != b) g += Grassmann::generator(a) * Grassmann::generator(b) * bounded_coeff(rng);
    }
  } else {
    for (int t = 0; t < 2; ++t)
      g += Grassmann::generator(pool[pick(rng)]) * bounded_coeff(rng);
    if (pool.size() >= 3) {
      int a = pool[pick(rng)], b = pool[pick(rng)], d = pool[pick(rng)];
      if (a != b && a != d && b != d)
        g += Grassmann::generator(a) * Grassmann::generator(b) * Grassmann::generator(d) *
             bounded_coeff(rng);
    }
  }
  return g;
}

template <typename F>
void for_each_deriv(int order, F&& f) {
  for (int n0 = 0; n0 <= order; ++n0)
    for (int n1 = 0; n1 + n0 <= order; ++n1)
      for (int n2 = 0; n2 + n1 + n0 <= order; ++n2)
        for (int n3 = 0; n3 + n2 + n1 + n0 <= order; ++n3)
          f(std::array<std::uint8_t, 4>{std::uint8_t(n0), std::uint8_t(n1),
                                        std::uint8_t(n2), std::uint8_t(n3)});
}

json dump_field(const Field& f) {
  json j;
  j["rows"] = f.spin_rows();
  j["cols"] = f.spin_cols();
  j["order"] = f.jet_order();
  json terms = json::array();
  for (const auto& [k, g] : f.terms()) {
    json t;
    t["f"] = k.form_mask;
    t["l"] = k.lam_mask;
    t["r"] = k.row;
    t["c"] = k.col;
    t["d"] = {k.deriv[0], k.deriv[1], k.deriv[2], k.deriv[3]};
    json coeff = json::array();
    for (const auto& [mask, v] : g.terms())
      coeff.push_back({mask, v.re.get_str(), v.im.get_str()});
    t["g"] = coeff;
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

Field load_field(const json& j) {
  Field f(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("order").get<int>());
  for (const auto& t : j.at("terms")) {
    JetKey k;
    k.form_mask = t.at("f").get<std::uint8_t>();
    k.lam_mask = t.at("l").get<std::uint8_t>();
    k.row = t.at("r").get<std::uint8_t>();
    k.col = t.at("c").get<std::uint8_t>();
    for (int i = 0; i < 4; ++i) k.deriv[i] = t.at("d").at(i).get<std::uint8_t>();
    Grassmann g;
    for (const auto& c : t.at("g")) {
      GrassmannMask mask = c.at(0).get<GrassmannMask>();
      GaussianRational v{Rational(c.at(1).get<std::string>()),
                         Rational(c.at(2).get<std::string>())};
      g += Grassmann::monomial(mask, v);
    }
    f.add_term(k, g);
  }
  return f;
}

}  // namespace

void BVConfig::finalize(const GammaRep& rep) {
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      Field comp(1, 1, jet_order);
      for (const auto& [k, g] : e.terms()) {
        if (k.form_mask != (std::uint8_t(1) << mu)) continue;
        if (k.lam_mask != (std::uint8_t(1) << a)) continue;
        JetKey nk;
        nk.deriv = k.deriv;
        comp.add_term(nk, g);
      }
      frame[a][mu] = comp;
    }
  einv = invert_jet_matrix(frame);

  gamma_und = eta_bracket(e, gamma_field(rep, jet_order));
  psi_dag = mul(e, mul(gamma_wedge_field(rep, 3, jet_order), mul(gamma_und, psi0_dag)))
                .scaled(rat(1, 6));

  Field chib = bar_field(rep, chi);
  for (int mu = 0; mu < 4; ++mu) {
    Field acc;
    for (int a = 0; a < 4; ++a) {
      QMat up = (eta_sign(a) < 0) ? grat(-1) * rep.gamma[a] : rep.gamma[a];
      Field bil = mul(chib, mul(Field::matrix_constant(up, jet_order), chi));
      acc += mul(bil, einv[mu][a]);
    }
    phi[mu] = acc;
  }
}

Field bar_field(const GammaRep& rep, const Field& psi) {
  if (psi.spin_rows() != 4 || psi.spin_cols() != 1)
    throw std::invalid_argument("bar_field: expects a column spinor field");
  Field f(1, 4, psi.jet_order());
  for (const auto& [k, g] : psi.terms())
    for (int c = 0; c < 4; ++c) {
      if (rep.C(k.row, c).is_zero()) continue;
      JetKey nk = k;
      nk.row = 0;
      nk.col = std::uint8_t(c);
      f.add_term(nk, rep.C(k.row, c) * g);
    }
  return f;
}

Field sample_scalar_jet(int parity, const std::vector<int>& pool,
                        std::mt19937_64& rng, int jet_order, bool nilpotent) {
  Field f(1, 1, jet_order);
  for_each_deriv(jet_order, [&](const std::array<std::uint8_t, 4>& d) {
    JetKey k;
    k.deriv = d;
    f.add_term(k, sample_coeff(parity, pool, rng, nilpotent));
  });
  return f;
}

Field sample_form_field(int i, int j, int parity, const std::vector<int>& pool,
                        std::mt19937_64& rng, int jet_order, bool nilpotent) {
  Field f(1, 1, jet_order);
  for (int fm = 0; fm < 16; ++fm) {
    if (std::popcount(unsigned(fm)) != i) continue;
    for (int lm = 0; lm < 16; ++lm) {
      if (std::popcount(unsigned(lm)) != j) continue;
      Field s = sample_scalar_jet(parity, pool, rng, jet_order, nilpotent);
      for (const auto& [k, g] : s.terms()) {
        JetKey nk = k;
        nk.form_mask = std::uint8_t(fm);
        nk.lam_mask = std::uint8_t(lm);
        f.add_term(nk, g);
      }
    }
  }
  return f;
}

Field sample_spinor_form(const GammaRep& rep, int i, int parity,
                         const std::vector<int>& pool, std::mt19937_64& rng,
                         int jet_order, bool nilpotent) {
  Field f(4, 1, jet_order);
  for (int fm = 0; fm < 16; ++fm) {
    if (std::popcount(unsigned(fm)) != i) continue;
    for_each_deriv(jet_order, [&](const std::array<std::uint8_t, 4>& d) {
      GSpinor sp = nilpotent ? majorana_sample_nilpotent_even(rep, pool, rng)
                             : majorana_sample(rep, parity, pool, rng);
      for (int r = 0; r < 4; ++r) {
        JetKey k;
        k.form_mask = std::uint8_t(fm);
        k.row = std::uint8_t(r);
        k.deriv = d;
        f.add_term(k, sp[r]);
      }
    });
  }
  return f;
}

BVConfig sample_config(const GammaRep& rep, std::uint64_t seed,
                       const SamplerOptions& opt) {
  std::mt19937_64 rng(seed);
  std::vector<int> even_pool = opt.ghost_pool;
  even_pool.insert(even_pool.end(), opt.anti_pool.begin(), opt.anti_pool.end());

  BVConfig cfg;
  cfg.jet_order = opt.jet_order;

  // Coframe: identity body plus bounded rational perturbation plus even soul.
  std::uniform_int_distribution<long> pert(-1, 1);
  cfg.e = Field(1, 1, opt.jet_order);
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      Field comp = sample_scalar_jet(0, even_pool, rng, opt.jet_order, /*nilpotent=*/true);
      JetKey k0;
      Grassmann body(GaussianRational(rat(pert(rng), opt.frame_pert_den)));
      if (a == mu) body += Grassmann(grat(1));
      comp.add_term(k0, body);
      for (const auto& [k, g] : comp.terms()) {
        JetKey nk = k;
        nk.form_mask = std::uint8_t(1) << mu;
        nk.lam_mask = std::uint8_t(1) << a;
        cfg.e.add_term(nk, g);
      }
    }

  cfg.omega = sample_form_field(1, 2, 0, even_pool, rng, opt.jet_order);
  cfg.psi = sample_spinor_form(rep, 1, 1, opt.fermion_pool, rng, opt.jet_order);
  for (int mu = 0; mu < 4; ++mu)
    cfg.xi[mu] = sample_scalar_jet(1, opt.anti_pool, rng, opt.jet_order);
  cfg.c = sample_form_field(0, 2, 1, opt.anti_pool, rng, opt.jet_order);
  cfg.chi = sample_spinor_form(rep, 0, 0, opt.ghost_pool, rng, opt.jet_order,
                               /*nilpotent=*/true);

  cfg.omega_check = sample_form_field(2, 1, 1, opt.anti_pool, rng, opt.jet_order);
  cfg.c_check = sample_form_field(2, 0, 1, opt.anti_pool, rng, opt.jet_order);
  cfg.psi0_dag = sample_spinor_form(rep, 1, 0, opt.anti_pool, rng, opt.jet_order);
  cfg.e_dag = sample_form_field(3, 3, 1, opt.anti_pool, rng, opt.jet_order);
  for (int mu = 0; mu < 4; ++mu)
    cfg.xi_dag[mu] = sample_form_field(4, 4, 0, opt.anti_pool, rng, opt.jet_order);
  cfg.chi0_dag = sample_spinor_form(rep, 0, 1, opt.anti_pool, rng, opt.jet_order);

  cfg.finalize(rep);
  return cfg;
}

BVConfig sample_config_pure_gravity(const GammaRep& rep, std::uint64_t seed,
                                    const SamplerOptions& opt) {
  BVConfig cfg = sample_config(rep, seed, opt);
  cfg.psi = Field(4, 1, opt.jet_order);
  cfg.chi = Field(4, 1, opt.jet_order);
  cfg.psi0_dag = Field(4, 1, opt.jet_order);
  cfg.chi0_dag = Field(4, 1, opt.jet_order);
  cfg.finalize(rep);
  return cfg;
}

std::string dump_config(const BVConfig& cfg) {
  json j;
  j["order"] = cfg.jet_order;
  j["e"] = dump_field(cfg.e);
  j["omega"] = dump_field(cfg.omega);
  j["psi"] = dump_field(cfg.psi);
  for (int mu = 0; mu < 4; ++mu) j["xi"][mu] = dump_field(cfg.xi[mu]);
  j["c"] = dump_field(cfg.c);
  j["chi"] = dump_field(cfg.chi);
  j["omega_check"] = dump_field(cfg.omega_check);
  j["c_check"] = dump_field(cfg.c_check);
  j["psi0_dag"] = dump_field(cfg.psi0_dag);
  j["e_dag"] = dump_field(cfg.e_dag);
  for (int mu = 0; mu < 4; ++mu) j["xi_dag"][mu] = dump_field(cfg.xi_dag[mu]);
  j["chi0_dag"] = dump_field(cfg.chi0_dag);
  return j.dump();
}

BVConfig load_config(const std::string& json_text, const GammaRep& rep) {
  json j = json::parse(json_text);
  BVConfig cfg;
  cfg.jet_order = j.at("order").get<int>();
  cfg.e = load_field(j.at("e"));
  cfg.omega = load_field(j.at("omega"));
  cfg.psi = load_field(j.at("psi"));
  for (int mu = 0; mu < 4; ++mu) cfg.xi[mu] = load_field(j.at("xi").at(mu));
  cfg.c = load_field(j.at("c"));
  cfg.chi = load_field(j.at("chi"));
  cfg.omega_check = load_field(j.at("omega_check"));
  cfg.c_check = load_field(j.at("c_check"));
  cfg.psi0_dag = load_field(j.at("psi0_dag"));
  cfg.e_dag = load_field(j.at("e_dag"));
  for (int mu = 0; mu < 4; ++mu) cfg.xi_dag[mu] = load_field(j.at("xi_dag").at(mu));
  cfg.chi0_dag = load_field(j.at("chi0_dag"));
  cfg.finalize(rep);
  return cfg;
}

}  // namespace sugra
