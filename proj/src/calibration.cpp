#include "muxlink/calibration.hpp"

#include <cmath>
#include <functional>

#include "muxlink/errors.hpp"

namespace muxlink::calibration {

namespace {

// Root of an increasing function by bisection; f(lo) <= 0 <= f(hi) required.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi) {
  if (!(f(lo) <= 0.0 && f(hi) >= 0.0)) throw DomainError("calibration target not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double mean_eta_s(const InterfaceParams& ip) {
  double s = 0.0;
  for (const auto& src : ip.sources) s += src.eta_s;
  return s / static_cast<double>(ip.m());
}

InterfaceParams with_noise(InterfaceParams ip, double chi, double g) {
  for (auto& s : ip.sources) {
    s.chi = chi;
    s.background = g;
  }
  return ip;
}

double stokes_total(const InterfaceParams& ip, DepletionModel depletion) {
  return detection::multiplexed_prob_table(ip, PolarizationBasis::kHV, depletion).stokes_total();
}

}  // namespace

std::string to_string(Mapping mapping) { return mapping == Mapping::kBell ? "bell" : "fidelity"; }

Mapping parse_mapping(const std::string& text) {
  if (text == "bell" || text == "S") return Mapping::kBell;
  if (text == "fidelity" || text == "F") return Mapping::kFidelity;
  throw DomainError("unknown calibration mapping '" + text + "'");
}

double visibility_from_bell(double s) { return s / quantum::kTsirelson; }
double visibility_from_fidelity(double f) { return (4.0 * f - 1.0) / 3.0; }

CalibrationResult calibrate_linear(const std::vector<std::array<double, 2>>& points, double chi_scale,
                                   const std::string& method) {
  if (points.size() < 2) throw DomainError("linear calibration needs at least two points");
  if (!(chi_scale > 0.0)) throw DomainError("chi scale must be positive");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p[0];
    my += p[1];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p[0] - mx) * (p[0] - mx);
    sxy += (p[0] - mx) * (p[1] - my);
  }
  if (!(sxx > 1e-300)) throw DomainError("degenerate calibration data: all p_S equal");

  CalibrationResult r;
  r.method = method;
  r.slope_per_ps = sxy / sxx;
  r.intercept = my - r.slope_per_ps * mx;
  r.chi_scale = chi_scale;
  r.deficit = 1.0 - r.intercept;
  r.slope = -r.slope_per_ps * chi_scale;
  double ss = 0.0;
  for (const auto& p : points) {
    const double res = p[1] - r.visibility(p[0]);
    r.residuals.push_back(res);
    ss += res * res;
  }
  r.residual_norm = std::sqrt(ss);
  return r;
}

CalibrationResult calibrate_table(const std::vector<BellTableRow>& rows, Mapping mapping, const InterfaceParams& ip) {
  ip.validate();
  std::vector<std::array<double, 2>> pts;
  pts.reserve(rows.size());
  for (const auto& row : rows)
    pts.push_back({row.p_s, mapping == Mapping::kBell ? visibility_from_bell(row.bell)
                                                      : visibility_from_fidelity(row.fidelity)});
  return calibrate_linear(pts, static_cast<double>(ip.m()) * mean_eta_s(ip), "least-squares/" + to_string(mapping));
}

detection::LinearLaw to_law(const CalibrationResult& fit, double background, double gamma_ref) {
  return {fit.deficit, fit.slope, background, gamma_ref};
}

BasisCalibration calibrate_basis_noise(const InterfaceParams& ip, const BasisTargets& targets,
                                       DepletionModel depletion) {
  ip.validate();
  for (double v : targets.visibility)
    if (!(v > 0.0 && v < 1.0)) throw DomainError("target visibilities must lie in (0, 1)");
  InterfaceParams clean = ip;
  for (auto& s : clean.sources) s.crosstalk = {};

  const double chi_hi = 0.3 / static_cast<double>(ip.m());
  auto chi_for = [&](double g) {
    return bisect_increasing(
        [&](double chi) { return stokes_total(with_noise(clean, chi, g), depletion) - targets.p_s; }, 0.0, chi_hi);
  };
  // Largest background that leaves room for chi > 0 at the target p_S.
  const double g_max = bisect_increasing(
      [&](double g) { return stokes_total(with_noise(clean, 0.0, g), depletion) - targets.p_s; }, 0.0, 0.5);
  auto v_hv = [&](double g) {
    return detection::composite_visibility(with_noise(clean, chi_for(g), g), PolarizationBasis::kHV, depletion);
  };
  // V_HV falls as G grows at fixed p_S.
  const double g = bisect_increasing([&](double x) { return targets.visibility[0] - v_hv(x); }, 0.0,
                                     g_max * (1.0 - 1e-9));

  BasisCalibration cal;
  cal.background = g;
  cal.chi = chi_for(g);
  const InterfaceParams base = with_noise(clean, cal.chi, g);
  for (std::size_t k = 1; k < 3; ++k) {
    const auto basis = quantum::kAllBases[k];
    auto v = [&](double sum) {
      InterfaceParams trial = base;
      for (auto& s : trial.sources) s.crosstalk_for(basis) = {sum / 2.0, sum / 2.0};
      return detection::composite_visibility(trial, basis, depletion);
    };
    const double sum = bisect_increasing([&](double x) { return targets.visibility[k] - v(x); }, 0.0, 0.45);
    cal.crosstalk[k] = {sum / 2.0, sum / 2.0};
  }
  const InterfaceParams fitted = apply_noise(base, cal);
  for (std::size_t k = 0; k < 3; ++k) {
    cal.achieved[k] = detection::composite_visibility(fitted, quantum::kAllBases[k], depletion);
    cal.residuals[k] = targets.visibility[k] - cal.achieved[k];
  }
  return cal;
}

InterfaceParams apply_noise(InterfaceParams ip, const BasisCalibration& cal) {
  for (auto& s : ip.sources) {
    s.background = cal.background;
    s.crosstalk = cal.crosstalk;
  }
  return ip;
}

}  // namespace muxlink::calibration
