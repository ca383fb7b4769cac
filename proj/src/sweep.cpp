#include "muxlink/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "muxlink/errors.hpp"
#include "muxlink/estimators.hpp"
#include "muxlink/repeater.hpp"
#include "muxlink/trial_sim.hpp"

namespace muxlink::io {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t basis_index(PolarizationBasis b) { return static_cast<std::size_t>(b); }

double mean_field(const InterfaceParams& ip, double detection::SourceParams::*field) {
  double s = 0.0;
  for (const auto& src : ip.sources) s += src.*field;
  return s / static_cast<double>(ip.m());
}

bool has_basis(const ScenarioConfig& cfg, PolarizationBasis b) {
  return std::find(cfg.bases.begin(), cfg.bases.end(), b) != cfg.bases.end();
}

// Interface and timing at one sweep point, before retrieval decay.
struct Point {
  InterfaceParams ip;
  sim::TimingConfig timing;
};

Point point_at(const ScenarioConfig& cfg, double value) {
  Point p{cfg.interface, cfg.timing};
  p.timing.rate = cfg.interface.rate;
  switch (cfg.sweep.axis) {
    case SweepAxis::kChi: p.ip = detection::with_equal_chi(p.ip, value); break;
    case SweepAxis::kStokes:
      p.ip = detection::with_equal_chi(p.ip, detection::solve_equal_chi_for_stokes(p.ip, value, cfg.depletion));
      break;
    case SweepAxis::kStorage:
      p.timing.storage_us = value;
      if (cfg.sweep.p_s)
        p.ip = detection::with_equal_chi(p.ip, detection::solve_equal_chi_for_stokes(p.ip, *cfg.sweep.p_s, cfg.depletion));
      break;
  }
  return p;
}

struct BasisResult {
  double c = kNaN, n = kNaN, v = kNaN, sigma = kNaN;
};

struct PointResult {
  double chi_bar = kNaN, gamma_bar = kNaN, p_s = kNaN, r = kNaN;
  std::array<BasisResult, 3> basis;
  double s = kNaN, sigma_s = kNaN, f = kNaN, sigma_f = kNaN;
  double s_law = kNaN, f_law = kNaN;
  double enh_r = kNaN, enh_c = kNaN;
};

void finish(PointResult& r, const ScenarioConfig& cfg, const InterfaceParams& decayed) {
  const auto& hv = r.basis[0];
  const auto& da = r.basis[1];
  if (!std::isnan(hv.v) && !std::isnan(da.v)) {
    r.s = detection::canonical_bell(hv.v, da.v);
    r.f = (3.0 * r.s / quantum::kTsirelson + 1.0) / 4.0;
    if (!std::isnan(hv.sigma) && !std::isnan(da.sigma)) {
      r.sigma_s = std::sqrt(2.0) * std::hypot(hv.sigma, da.sigma);
      r.sigma_f = 3.0 / 4.0 * r.sigma_s / quantum::kTsirelson;
    }
  }
  if (cfg.bell_law && !std::isnan(r.p_s)) {
    const double chi_bar = r.p_s / (static_cast<double>(decayed.m()) * mean_field(decayed, &detection::SourceParams::eta_s));
    const double v = cfg.bell_law->visibility(chi_bar, r.gamma_bar);
    r.s_law = quantum::kTsirelson * v;
    r.f_law = (3.0 * v + 1.0) / 4.0;
  }
}

PointResult analytic_point(const ScenarioConfig& cfg, const Point& pt) {
  const InterfaceParams decayed = sim::apply_decay(pt.ip, pt.timing);
  PointResult r;
  r.chi_bar = mean_field(decayed, &detection::SourceParams::chi);
  r.gamma_bar = mean_field(decayed, &detection::SourceParams::gamma);
  for (auto b : cfg.bases) {
    const auto table = detection::multiplexed_prob_table(decayed, b, cfg.depletion);
    auto& br = r.basis[basis_index(b)];
    br.c = decayed.rate * table.matched_total();
    br.n = decayed.rate * table.mismatched_total();
    br.v = detection::weighted_visibility(table);
    r.p_s = table.stokes_total();
    r.r = decayed.rate * r.p_s;
  }
  if (has_basis(cfg, PolarizationBasis::kHV)) {
    try {
      const auto e = detection::enhancement_at_visibility(decayed, PolarizationBasis::kHV, r.basis[0].v, cfg.depletion);
      r.enh_r = e.stokes_ratio;
      r.enh_c = e.coincidence_ratio;
    } catch (const DomainError&) {
      // Flat V(chi) (no noise at all): no unique matching chi, leave the ratios empty.
    }
  }
  finish(r, cfg, decayed);
  return r;
}

PointResult mc_point(const ScenarioConfig& cfg, const Point& pt, std::size_t point_index) {
  const InterfaceParams decayed = sim::apply_decay(pt.ip, pt.timing);
  PointResult r;
  r.chi_bar = mean_field(decayed, &detection::SourceParams::chi);
  r.gamma_bar = mean_field(decayed, &detection::SourceParams::gamma);
  for (auto b : cfg.bases) {
    const std::uint64_t stream = 8 * point_index + basis_index(b);
    const auto counts =
        sim::run_simulation(sim::block_seed(cfg.seed, stream), pt.ip, pt.timing, b, cfg.cycles, sim::Sampler::kFast);
    const double trials = static_cast<double>(counts.trials);
    auto& br = r.basis[basis_index(b)];
    br.c = decayed.rate * static_cast<double>(counts.matched_total()) / trials;
    br.n = decayed.rate * static_cast<double>(counts.mismatched_total()) / trials;
    try {
      const auto est = sim::estimate_visibility(counts, {sim::kBootstrapReplicas, sim::block_seed(~cfg.seed, stream)});
      br.v = est.value;
      br.sigma = est.sigma;
    } catch (const UndefinedEstimate&) {
    }
    r.p_s = static_cast<double>(counts.stokes_total()) / trials;
    r.r = decayed.rate * r.p_s;
  }
  finish(r, cfg, decayed);
  return r;
}

std::vector<std::string> sweep_header() {
  return {"axis",    "value",   "mode",      "chi_bar",  "gamma_bar",  "p_s",      "R",        "C_HV",  "N_HV",
          "C_DA",    "N_DA",    "C_RL",      "N_RL",     "V_HV",       "sigma_V_HV", "V_DA",   "sigma_V_DA",
          "V_RL",    "sigma_V_RL", "S",      "sigma_S",  "F",          "sigma_F",  "S_law",    "F_law", "enh_R",
          "enh_C"};
}

std::vector<std::string> sweep_row(const ScenarioConfig& cfg, double value, const char* mode, const PointResult& r) {
  std::vector<std::string> row = {to_string(cfg.sweep.axis), format_number(value), mode,
                                  format_number(r.chi_bar), format_number(r.gamma_bar), format_number(r.p_s),
                                  format_number(r.r)};
  for (const auto& b : r.basis) {
    row.push_back(format_number(b.c));
    row.push_back(format_number(b.n));
  }
  for (const auto& b : r.basis) {
    row.push_back(format_number(b.v));
    row.push_back(format_number(b.sigma));
  }
  for (double x : {r.s, r.sigma_s, r.f, r.sigma_f, r.s_law, r.f_law, r.enh_r, r.enh_c}) row.push_back(format_number(x));
  return row;
}

template <class F>
auto with_context(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(what + ": " + e.what());
  }
}

ScenarioConfig prepared(const ScenarioConfig& cfg) {
  return cfg.calibrate ? apply_calibration(cfg, run_calibration(cfg)) : cfg;
}

}  // namespace

const std::string& Table::at(std::size_t row, const std::string& column) const {
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw std::out_of_range("no column '" + column + "'");
  return rows.at(row).at(static_cast<std::size_t>(it - header.begin()));
}

double Table::number(std::size_t row, const std::string& column) const {
  const std::string& cell = at(row, column);
  return cell.empty() ? kNaN : std::stod(cell);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const Table& table, const std::string& command, const ScenarioConfig& cfg) {
  out << "# muxlink " << kVersion << "\n";
  out << "# command: " << command << "\n";
  out << "# config_hash: " << config_hash(cfg) << "\n";
  out << "# seed: " << cfg.seed << "\n";
  out << "# mode: " << to_string(cfg.mode) << "\n";
  out << "# cycles: " << cfg.cycles << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

CalibrationReport run_calibration(const ScenarioConfig& cfg) {
  return with_context("calibration", [&] {
    CalibrationReport rep;
    rep.bell = calibration::calibrate_table(cfg.calibration.table, calibration::Mapping::kBell, cfg.interface);
    rep.fidelity = calibration::calibrate_table(cfg.calibration.table, calibration::Mapping::kFidelity, cfg.interface);
    sim::TimingConfig ref = cfg.timing;
    ref.storage_us = kCalibrationStorageUs;
    const InterfaceParams at_ref = sim::apply_decay(cfg.interface, ref);
    rep.basis = calibration::calibrate_basis_noise(at_ref, cfg.calibration.basis_targets, cfg.depletion);
    rep.law = calibration::to_law(rep.bell, rep.basis.background, mean_field(at_ref, &detection::SourceParams::gamma));
    return rep;
  });
}

ScenarioConfig apply_calibration(ScenarioConfig cfg, const CalibrationReport& report) {
  cfg.interface = calibration::apply_noise(cfg.interface, report.basis);
  cfg.bell_law = report.law;
  cfg.calibrate = false;
  return cfg;
}

Table run_sweep(const ScenarioConfig& raw) {
  const ScenarioConfig cfg = prepared(raw);
  Table t;
  t.header = sweep_header();
  for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
    const double value = cfg.sweep.values[i];
    const std::string ctx = "sweep point " + to_string(cfg.sweep.axis) + "=" + format_number(value);
    const Point pt = with_context(ctx, [&] { return point_at(cfg, value); });
    if (cfg.mode != Mode::kMonteCarlo)
      t.rows.push_back(sweep_row(cfg, value, "analytic", with_context(ctx, [&] { return analytic_point(cfg, pt); })));
    if (cfg.mode != Mode::kAnalytic)
      t.rows.push_back(sweep_row(cfg, value, "mc", with_context(ctx, [&] { return mc_point(cfg, pt, i); })));
  }
  return t;
}

Table run_repeater(const ScenarioConfig& raw) {
  const ScenarioConfig cfg = prepared(raw);
  const auto& rs = cfg.repeater;
  sim::TimingConfig timing = cfg.timing;
  timing.rate = cfg.interface.rate;
  const InterfaceParams ip = sim::apply_decay(cfg.interface, timing);
  const std::size_t M = ip.m();

  // Per-source Stokes probability and canonical-angle visibility of the interface.
  std::vector<double> p_s(M), v_src(M);
  for (std::size_t i = 0; i < M; ++i) {
    const auto& s = ip.sources[i];
    p_s[i] = rs.p_s ? *rs.p_s : detection::prob_table(s, PolarizationBasis::kHV, ip.accidentals).stokes();
    const double s_i = detection::canonical_bell(detection::single_source_visibility(s, PolarizationBasis::kHV, ip.accidentals),
                                                 detection::single_source_visibility(s, PolarizationBasis::kDA, ip.accidentals));
    v_src[i] = std::clamp(s_i / quantum::kTsirelson, 0.0, 1.0);
  }
  const double eta_rc_bar = rs.eta_rc_bar ? *rs.eta_rc_bar : mean_field(ip, &detection::SourceParams::eta_rc);
  const double swap = rs.swap_success ? *rs.swap_success
                                      : repeater::swap_success(mean_field(ip, &detection::SourceParams::gamma),
                                                               mean_field(ip, &detection::SourceParams::eta_s));

  Table t;
  t.header = {"m",     "n",        "L0_km",      "L_km",    "p_link_single", "p_link_multiplexed", "p_link_linear",
              "T_single_s", "T_multiplexed_s", "T_multiplexed_exact_s", "speedup", "reachable", "V_AB", "F_AB",
              "S_AB",  "V_AB_exact", "N_norm"};
  for (std::size_t m : rs.modes)
    for (std::size_t n : rs.nesting) {
      with_context("repeater row m=" + std::to_string(m) + " n=" + std::to_string(n), [&] {
        std::vector<double> pa(m), va(m);
        for (std::size_t i = 0; i < m; ++i) {
          pa[i] = p_s[i % M];
          va[i] = v_src[i % M];
        }
        repeater::LinkParams lp;
        lp.length_km = rs.elementary_km;
        lp.attenuation_km = rs.attenuation_km;
        lp.eta_dc = rs.eta_dc;
        lp.m = m;
        lp.p_s_a = pa;
        lp.p_s_b = pa;
        repeater::ChainParams cp;
        cp.length_km = std::ldexp(rs.elementary_km, static_cast<int>(n));
        cp.nesting = n;
        cp.fiber_speed_km_s = rs.fiber_speed_km_s;
        cp.swap_success.assign(n, swap);
        cp.eta_rc_bar = m == 1 ? 1.0 : eta_rc_bar;  // a single mode bypasses the router
        cp.m = m;

        // Channels are close to uniform; the single-channel figure is their mean.
        double p1 = 0.0;
        for (std::size_t i = 0; i < m; ++i) p1 += repeater::link_success_single(lp, i);
        p1 /= static_cast<double>(m);
        const auto t_single = repeater::total_time(cp, p1, false);
        const auto t_mux = repeater::total_time(cp, p1, true);
        const auto t_exact = repeater::total_time_exact(cp, lp);
        auto cell = [](const repeater::TotalTime& tt) { return tt.reachable() ? format_number(tt.seconds()) : std::string("inf"); };
        const bool reachable = t_single.reachable() && t_mux.reachable() && t_exact.reachable();
        const double speedup = t_single.reachable() && t_mux.reachable() ? t_single.seconds() / t_mux.seconds() : kNaN;

        const auto q = repeater::composite_link_quality(va, va, pa, pa, rs.zeta);
        t.rows.push_back({std::to_string(m), std::to_string(n), format_number(rs.elementary_km),
                          format_number(cp.length_km), format_number(p1),
                          format_number(repeater::link_success_multiplexed(lp)),
                          format_number(repeater::link_success_linear(lp)), cell(t_single), cell(t_mux), cell(t_exact),
                          format_number(speedup), reachable ? "1" : "0", format_number(q.product.visibility),
                          format_number(q.product.fidelity), format_number(q.product.bell),
                          format_number(q.exact.visibility), format_number(q.normalization)});
      });
    }
  return t;
}

Table calibration_table(const ScenarioConfig& cfg, const CalibrationReport& rep) {
  Table t;
  t.header = {"section", "name", "value"};
  auto add = [&](const std::string& s, const std::string& n, double v) { t.rows.push_back({s, n, format_number(v)}); };
  for (const auto* fit : {&rep.bell, &rep.fidelity}) {
    const std::string sec = fit->method;
    add(sec, "intercept", fit->intercept);
    add(sec, "slope_per_p_s", fit->slope_per_ps);
    add(sec, "chi_scale", fit->chi_scale);
    add(sec, "deficit_Z", fit->deficit);
    add(sec, "slope_K", fit->slope);
    add(sec, "residual_norm", fit->residual_norm);
  }
  for (std::size_t i = 0; i < cfg.calibration.table.size(); ++i) {
    const auto& row = cfg.calibration.table[i];
    const std::string sec = "row" + std::to_string(i);
    add(sec, "p_s", row.p_s);
    add(sec, "S_observed", row.bell);
    add(sec, "S_fit", rep.bell.bell(row.p_s));
    add(sec, "F_observed", row.fidelity);
    add(sec, "F_fit", rep.fidelity.fidelity(row.p_s));
  }
  add("basis", "p_s", cfg.calibration.basis_targets.p_s);
  add("basis", "chi", rep.basis.chi);
  add("basis", "background_G", rep.basis.background);
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string b(quantum::to_string(quantum::kAllBases[k]));
    add("basis", "crosstalk_sum_" + b, rep.basis.crosstalk[k].sum());
    add("basis", "V_target_" + b, cfg.calibration.basis_targets.visibility[k]);
    add("basis", "V_fit_" + b, rep.basis.achieved[k]);
  }
  add("law", "deficit", rep.law.deficit);
  add("law", "slope", rep.law.slope);
  add("law", "background", rep.law.background);
  add("law", "gamma_ref", rep.law.gamma_ref);
  return t;
}

Table run_tomography(const ScenarioConfig& cfg) {
  const auto& ts = cfg.tomography;
  Table t;
  t.header = {"theta_deg", "visibility", "shots", "fidelity_to_input", "fidelity_to_pure", "S_input",
              "S_reconstructed"};
  const auto pure_state = quantum::swpe_state(ts.theta_deg * quantum::kPi / 180.0);
  const auto pure = quantum::DensityMatrix::pure(pure_state);
  for (std::size_t k = 0; k < ts.visibilities.size(); ++k) {
    with_context("tomography visibility " + format_number(ts.visibilities[k]), [&] {
      const auto rho = quantum::DensityMatrix::werner(pure_state, ts.visibilities[k]);
      sim::Rng rng(sim::block_seed(cfg.seed, k));
      const auto rec = quantum::tomography_reconstruct(sim::measure_pauli_expectations(rho, ts.shots, rng));
      t.rows.push_back({format_number(ts.theta_deg), format_number(ts.visibilities[k]), std::to_string(ts.shots),
                        format_number(quantum::uhlmann_fidelity(rho, rec)),
                        format_number(quantum::uhlmann_fidelity(pure, rec)), format_number(quantum::chsh(rho)),
                        format_number(quantum::chsh(rec))});
    });
  }
  return t;
}

}  // namespace muxlink::io
