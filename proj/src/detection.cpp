#include "muxlink/detection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "muxlink/errors.hpp"

namespace muxlink::detection {

namespace {

void require_unit(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

// Bisection for f(x) = target on an interval where f is decreasing.
double solve_decreasing(const std::function<double(double)>& f, double target, double lo, double hi) {
  double f_lo = f(lo), f_hi = f(hi);
  if (!(f_lo >= target && f_hi <= target)) throw DomainError("target outside the reachable range");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for the maximum of a unimodal function.
double argmax_unimodal(const std::function<double(double)>& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

double visibility_from(double c, double n) {
  if (!(c + n > 0.0)) throw UndefinedEstimate("no coincidences, visibility undefined");
  return std::abs(c - n) / (c + n);
}

// Mean of the per-source router-free rates at a common chi.
Rates average_single_rates(const InterfaceParams& ip, PolarizationBasis basis, double chi) {
  Rates out;
  for (std::size_t i = 0; i < ip.m(); ++i) {
    SourceParams p = ip.sources[i];
    p.chi = chi;
    p.eta_rc = 1.0;
    const Rates r = single_source_rates(p, ip.rate, basis, ip.accidentals);
    out.stokes += r.stokes;
    out.coincidence += r.coincidence;
    out.cross += r.cross;
  }
  const double m = static_cast<double>(ip.m());
  out.stokes /= m;
  out.coincidence /= m;
  out.cross /= m;
  return out;
}

// chi on the falling branch of V(chi) where V = target.
double solve_falling_branch(const std::function<double(double)>& v, double target, double chi_max) {
  const double lo = 1e-12;
  const double peak = argmax_unimodal(v, lo, chi_max);
  if (v(peak) < target) throw DomainError("visibility target above the attainable maximum");
  return solve_decreasing(v, target, peak, chi_max);
}

}  // namespace

double checked_probability(double value) {
  if (value < -1e-9 || value > 1.0 + 1e-9 || std::isnan(value))
    throw RegimeError("probability " + std::to_string(value) + " outside [0, 1]; first-order model invalid");
  return std::clamp(value, 0.0, 1.0);
}

void SourceParams::validate() const {
  require_unit(chi, "chi");
  if (!(theta >= 0.0 && theta <= quantum::kPi / 2.0)) throw DomainError("theta must lie in [0, pi/2]");
  require_unit(gamma, "gamma");
  require_unit(eta_s, "eta_s");
  require_unit(eta_t, "eta_t");
  require_unit(eta_rc, "eta_rc");
  require_unit(background, "background");
  for (const auto& x : crosstalk) {
    if (!(x.stokes >= 0.0 && x.stokes < 0.5)) throw DomainError("crosstalk a must lie in [0, 0.5)");
    if (!(x.antistokes >= 0.0 && x.antistokes < 0.5)) throw DomainError("crosstalk b must lie in [0, 0.5)");
  }
}

void InterfaceParams::validate() const {
  if (sources.empty()) throw DomainError("interface needs at least one source");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("trial rate must be positive");
  for (const auto& s : sources) s.validate();
}

bool InterfaceParams::first_order_valid() const {
  const double m_d = static_cast<double>(m());
  return std::all_of(sources.begin(), sources.end(), [&](const SourceParams& s) { return s.chi * m_d < 0.3; });
}

double ProbTableRow::matched() const noexcept {
  return basis == PolarizationBasis::kRL ? xy + yx : xx + yy;
}

double ProbTableRow::mismatched() const noexcept {
  return basis == PolarizationBasis::kRL ? xx + yy : xy + yx;
}

std::array<std::array<double, 2>, 2> ProbTableRow::conditional() const {
  std::array<std::array<double, 2>, 2> out{};
  if (stokes_x > 0.0) out[0] = {xx / stokes_x, xy / stokes_x};
  if (stokes_y > 0.0) out[1] = {yx / stokes_y, yy / stokes_y};
  return out;
}

double ProbTable::stokes_total() const {
  return std::accumulate(rows.begin(), rows.end(), 0.0, [](double acc, const ProbTableRow& r) { return acc + r.stokes(); });
}

double ProbTable::matched_total() const {
  return std::accumulate(rows.begin(), rows.end(), 0.0, [](double acc, const ProbTableRow& r) { return acc + r.matched(); });
}

double ProbTable::mismatched_total() const {
  return std::accumulate(rows.begin(), rows.end(), 0.0,
                         [](double acc, const ProbTableRow& r) { return acc + r.mismatched(); });
}

ProbTableRow prob_table(const SourceParams& p, PolarizationBasis basis, AccidentalModel accidentals) {
  p.validate();
  const double c2 = std::cos(p.theta) * std::cos(p.theta);
  const double s2 = std::sin(p.theta) * std::sin(p.theta);
  const double base = p.chi * p.gamma * p.eta_s * p.eta_t;
  const double g = p.background;
  const Crosstalk x = p.crosstalk_for(basis);
  const double a = x.stokes, b = x.antistokes;
  const bool acc = accidentals == AccidentalModel::kPerTrial;

  ProbTableRow row;
  row.basis = basis;
  if (basis == PolarizationBasis::kHV) {
    row.stokes_x = p.chi * c2 * (1 - a) * p.eta_s + g * p.eta_s + a * p.chi * s2 * p.eta_s;
    row.stokes_y = p.chi * s2 * (1 - a) * p.eta_s + g * p.eta_s + a * p.chi * c2 * p.eta_s;
    row.antistokes_x = p.chi * p.gamma * p.eta_t * (c2 * (1 - b) + b * s2) + g * p.eta_t;
    row.antistokes_y = p.chi * p.gamma * p.eta_t * (s2 * (1 - b) + b * c2) + g * p.eta_t;
    row.xx = c2 * base * (1 - a - b);
    row.yy = s2 * base * (1 - a - b);
    row.xy = (a + b) * base * c2;
    row.yx = (a + b) * base * s2;
  } else {
    // D-A and R-L share one structure; only which pairs count as matched differs.
    const double sum2 = (std::cos(p.theta) + std::sin(p.theta)) * (std::cos(p.theta) + std::sin(p.theta));
    const double diff2 = (std::cos(p.theta) - std::sin(p.theta)) * (std::cos(p.theta) - std::sin(p.theta));
    row.stokes_x = row.stokes_y = p.chi * p.eta_s / 2 + g * p.eta_s;
    row.antistokes_x = row.antistokes_y = p.chi * p.gamma * p.eta_t / 2 + g * p.eta_t;
    const double good = sum2 / 4 * base * (1 - a - b);
    const double bad = diff2 / 4 * base + (a + b) / 4 * sum2 * base;
    if (basis == PolarizationBasis::kDA) {
      row.xx = row.yy = good;
      row.xy = row.yx = bad;
    } else {
      row.xy = row.yx = good;
      row.xx = row.yy = bad;
    }
  }
  if (acc) {
    row.xx += row.stokes_x * row.antistokes_x;
    row.yy += row.stokes_y * row.antistokes_y;
    row.xy += row.stokes_x * row.antistokes_y;
    row.yx += row.stokes_y * row.antistokes_x;
  }
  for (double* v : {&row.stokes_x, &row.stokes_y, &row.antistokes_x, &row.antistokes_y, &row.xx, &row.yy, &row.xy,
                    &row.yx})
    *v = checked_probability(*v);
  checked_probability(row.stokes());
  checked_probability(row.joint_total());
  return row;
}

Rates single_source_rates(const SourceParams& p, double rate, PolarizationBasis basis, AccidentalModel accidentals) {
  const ProbTableRow row = prob_table(p, basis, accidentals);
  return {rate * row.stokes(), rate * row.matched(), rate * row.mismatched()};
}

double single_source_visibility(const SourceParams& p, PolarizationBasis basis, AccidentalModel accidentals) {
  const ProbTableRow row = prob_table(p, basis, accidentals);
  return visibility_from(row.matched(), row.mismatched());
}

VisibilityFit visibility_fit(const SourceParams& p, PolarizationBasis basis) {
  p.validate();
  if (!(p.gamma > 0.0)) throw DomainError("visibility fit needs gamma > 0");
  const double ab = p.crosstalk_for(basis).sum();
  const double noise = 2.0 * p.background * (1.0 + 1.0 / p.gamma);
  if (basis == PolarizationBasis::kHV) return {2.0 * ab + noise, 1.0 - 2.0 * ab};
  const double diff2 = (std::cos(p.theta) - std::sin(p.theta)) * (std::cos(p.theta) - std::sin(p.theta));
  return {diff2 + 2.0 * ab + noise, 1.0 - diff2 - 2.0 * ab - 2.0 * noise};
}

double mean_stokes_probability(const InterfaceParams& ip, PolarizationBasis basis) {
  ip.validate();
  double total = 0.0;
  for (const auto& s : ip.sources) total += prob_table(s, basis, ip.accidentals).stokes();
  return total / static_cast<double>(ip.m());
}

std::vector<double> depletion_factors(const InterfaceParams& ip, DepletionModel model, PolarizationBasis basis) {
  ip.validate();
  std::vector<double> out(ip.m(), 1.0);
  if (model == DepletionModel::kAverage) {
    const double pbar = mean_stokes_probability(ip, basis);
    for (std::size_t i = 1; i < ip.m(); ++i) out[i] = out[i - 1] * (1.0 - pbar);
  } else {
    for (std::size_t i = 1; i < ip.m(); ++i)
      out[i] = out[i - 1] * (1.0 - prob_table(ip.sources[i - 1], basis, ip.accidentals).stokes());
  }
  return out;
}

ProbTable multiplexed_prob_table(const InterfaceParams& ip, PolarizationBasis basis, DepletionModel depletion) {
  const std::vector<double> dep = depletion_factors(ip, depletion, basis);
  ProbTable table;
  table.basis = basis;
  table.rows.reserve(ip.m());
  for (std::size_t i = 0; i < ip.m(); ++i) {
    ProbTableRow row = prob_table(ip.sources[i], basis, ip.accidentals);
    const double routed = dep[i] * ip.sources[i].eta_rc;
    row.stokes_x *= dep[i];
    row.stokes_y *= dep[i];
    // Anti-Stokes photons only reach the detectors through the router.
    row.antistokes_x *= routed;
    row.antistokes_y *= routed;
    row.xx *= routed;
    row.yy *= routed;
    row.xy *= routed;
    row.yx *= routed;
    table.rows.push_back(row);
  }
  checked_probability(table.stokes_total());
  return table;
}

Rates multiplexed_rates(const InterfaceParams& ip, PolarizationBasis basis, DepletionModel depletion) {
  const ProbTable table = multiplexed_prob_table(ip, basis, depletion);
  return {ip.rate * table.stokes_total(), ip.rate * table.matched_total(), ip.rate * table.mismatched_total()};
}

double weighted_visibility(const ProbTable& table) {
  const double total = table.matched_total() + table.mismatched_total();
  if (!(total > 0.0)) throw UndefinedEstimate("no coincidences, visibility undefined");
  double v = 0.0;
  for (const auto& row : table.rows) {
    const double w = row.matched() + row.mismatched();
    if (w > 0.0) v += (w / total) * visibility_from(row.matched(), row.mismatched());
  }
  return v;
}

double pooled_visibility(const ProbTable& table) {
  return visibility_from(table.matched_total(), table.mismatched_total());
}

double composite_visibility(const InterfaceParams& ip, PolarizationBasis basis, DepletionModel depletion) {
  return weighted_visibility(multiplexed_prob_table(ip, basis, depletion));
}

double canonical_bell(double visibility_hv, double visibility_da) {
  return std::sqrt(2.0) * (visibility_hv + visibility_da);
}

InterfaceParams non_multiplexed(const InterfaceParams& ip, std::size_t index) {
  if (index >= ip.m()) throw DomainError("source index out of range");
  InterfaceParams out = ip;
  out.sources = {ip.sources[index]};
  out.sources.front().eta_rc = 1.0;
  return out;
}

InterfaceParams with_equal_chi(InterfaceParams ip, double chi) {
  for (auto& s : ip.sources) s.chi = chi;
  return ip;
}

double solve_equal_chi_for_stokes(const InterfaceParams& ip, double target, DepletionModel depletion) {
  ip.validate();
  auto stokes = [&](double chi) {
    return multiplexed_prob_table(with_equal_chi(ip, chi), PolarizationBasis::kHV, depletion).stokes_total();
  };
  // p_S^(m) rises with chi; negate to reuse the decreasing solver.
  const double hi = std::min(1.0, 0.3 / static_cast<double>(ip.m()) * 3.0);
  return solve_decreasing([&](double chi) { return -stokes(chi); }, -target, 0.0, hi);
}

Enhancement enhancement_at_visibility(const InterfaceParams& ip, PolarizationBasis basis, double target,
                                      DepletionModel depletion) {
  ip.validate();
  const double chi_max = 0.3 / static_cast<double>(ip.m());
  auto v_single = [&](double chi) {
    const Rates r = average_single_rates(ip, basis, chi);
    return visibility_from(r.coincidence, r.cross);
  };
  auto v_mux = [&](double chi) { return composite_visibility(with_equal_chi(ip, chi), basis, depletion); };

  Enhancement e;
  e.chi_single = solve_falling_branch(v_single, target, chi_max);
  e.chi_multiplexed = solve_falling_branch(v_mux, target, chi_max);
  const Rates single = average_single_rates(ip, basis, e.chi_single);
  const Rates mux = multiplexed_rates(with_equal_chi(ip, e.chi_multiplexed), basis, depletion);
  e.stokes_ratio = mux.stokes / single.stokes;
  e.coincidence_ratio = mux.coincidence / single.coincidence;
  return e;
}

Enhancement enhancement_limit(const InterfaceParams& ip, PolarizationBasis basis) {
  ip.validate();
  InterfaceParams clean = ip;
  for (auto& s : clean.sources) s.background = 0.0;
  // Rates are linear in chi at leading order, so a vanishing chi gives the limit to ~1e-10.
  const double chi = 1e-10;
  clean = with_equal_chi(clean, chi);
  const Rates single = average_single_rates(clean, basis, chi);
  const Rates mux = multiplexed_rates(clean, basis, DepletionModel::kAverage);
  return {chi, chi, mux.stokes / single.stokes, mux.coincidence / single.coincidence};
}

double LinearLaw::deficit_at(double gamma) const {
  if (!(gamma > 0.0) || !(gamma_ref > 0.0)) throw DomainError("retrieval efficiency must be positive");
  return deficit + 2.0 * background * (1.0 / gamma - 1.0 / gamma_ref);
}

}  // namespace muxlink::detection
