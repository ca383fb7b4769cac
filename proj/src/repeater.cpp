#include "muxlink/repeater.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "muxlink/errors.hpp"

namespace muxlink::repeater {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

double channel_value(const std::vector<double>& v, std::size_t m, std::size_t i) {
  if (i >= m) throw DomainError("channel index out of range");
  return v.size() == 1 ? v.front() : v.at(i);
}

// 4-qubit amplitude index: (photon A, memory A, photon B, memory B).
int idx4(int sa, int ma, int sb, int mb) { return 8 * sa + 4 * ma + 2 * sb + mb; }

struct Branch {
  double probability;
  Eigen::Vector4cd memories;  // unnormalized, index 2*ma + mb
  bool odd;
};

// The four D/A outcomes of the post-selected same-polarization component.
std::array<Branch, 4> bsm_branches(const quantum::PureTwoQubitState& a, const quantum::PureTwoQubitState& b) {
  std::array<quantum::Complex, 16> psi{};
  for (int sa = 0; sa < 2; ++sa)
    for (int ma = 0; ma < 2; ++ma)
      for (int sb = 0; sb < 2; ++sb)
        for (int mb = 0; mb < 2; ++mb)
          // Half-wave plate on B's photon swaps H and V.
          psi[idx4(sa, ma, 1 - sb, mb)] = a[2 * sa + ma] * b[2 * sb + mb];

  const double r = 1.0 / std::sqrt(2.0);
  const double da[2][2] = {{r, r}, {r, -r}};  // <D|s>, <A|s>
  std::array<Branch, 4> out{};
  for (int oa = 0; oa < 2; ++oa)
    for (int ob = 0; ob < 2; ++ob) {
      Branch& br = out[2 * oa + ob];
      br.memories.setZero();
      for (int ma = 0; ma < 2; ++ma)
        for (int mb = 0; mb < 2; ++mb)
          for (int s = 0; s < 2; ++s)  // only equal polarizations leave by different ports
            br.memories[2 * ma + mb] += da[oa][s] * da[ob][s] * psi[idx4(s, ma, s, mb)];
      br.probability = br.memories.squaredNorm();
      br.odd = oa != ob;
    }
  return out;
}

}  // namespace

void LinkParams::validate() const {
  if (!(length_km >= 0.0) || !std::isfinite(length_km)) throw DomainError("link length must be >= 0");
  if (!(attenuation_km > 0.0)) throw DomainError("attenuation length must be positive");
  if (!(eta_dc > 0.0 && eta_dc <= 1.0)) throw DomainError("eta_dc must lie in (0, 1]");
  if (m < 1) throw DomainError("m must be >= 1");
  for (const auto* v : {&p_s_a, &p_s_b}) {
    if (v->size() != 1 && v->size() != m) throw DomainError("per-channel Stokes probabilities need 1 or m entries");
    for (double p : *v) require_probability(p, "Stokes detection probability");
  }
  require_probability(bsm_efficiency, "BSM efficiency");
}

double LinkParams::p_s_a_at(std::size_t channel) const { return channel_value(p_s_a, m, channel); }
double LinkParams::p_s_b_at(std::size_t channel) const { return channel_value(p_s_b, m, channel); }

double link_success_single(const LinkParams& lp, std::size_t channel) {
  lp.validate();
  return lp.bsm_efficiency * lp.p_s_a_at(channel) * lp.p_s_b_at(channel) * lp.eta_dc * lp.eta_dc *
         std::exp(-lp.length_km / lp.attenuation_km);
}

double link_success_multiplexed(const LinkParams& lp) {
  lp.validate();
  // log-space keeps m = 1 bit-identical to the single-channel value at small p
  double log_fail = 0.0;
  for (std::size_t i = 0; i < lp.m; ++i) log_fail += std::log1p(-link_success_single(lp, i));
  return -std::expm1(log_fail);
}

double link_success_linear(const LinkParams& lp) {
  lp.validate();
  double sum = 0.0;
  for (std::size_t i = 0; i < lp.m; ++i) sum += link_success_single(lp, i);
  return sum;
}

double swap_success(double gamma_a, double gamma_b, double eta_s_a, double eta_s_b) {
  for (double x : {gamma_a, gamma_b, eta_s_a, eta_s_b}) require_probability(x, "swap efficiency");
  return 0.5 * gamma_a * gamma_b * eta_s_a * eta_s_b;
}

void ChainParams::validate() const {
  if (!(length_km > 0.0) || !std::isfinite(length_km)) throw DomainError("chain length must be positive");
  if (!(fiber_speed_km_s > 0.0)) throw DomainError("fiber speed must be positive");
  if (swap_success.size() != nesting) throw DomainError("need one swap success probability per nesting level");
  for (double p : swap_success) require_probability(p, "swap success");
  if (!(eta_rc_bar > 0.0 && eta_rc_bar <= 1.0)) throw DomainError("eta_rc_bar must lie in (0, 1]");
  if (m < 1) throw DomainError("m must be >= 1");
}

void ChainParams::check_consistent(double elementary_km) const {
  const double expected = std::ldexp(elementary_km, static_cast<int>(nesting));
  if (std::abs(length_km - expected) > 1e-9 * std::max(1.0, expected))
    throw DomainError("chain length must equal 2^n times the elementary link length");
}

double TotalTime::seconds() const {
  if (!seconds_) throw DomainError("distribution time is unreachable");
  return *seconds_;
}

TotalTime total_time(const ChainParams& cp, double p_link, bool multiplexed) {
  cp.validate();
  require_probability(p_link, "link success");
  // Work in logs so tiny probabilities do not overflow before the check.
  double log_den = std::log(p_link);
  for (double p : cp.swap_success) log_den += std::log(p);
  if (multiplexed)
    log_den += std::log(static_cast<double>(cp.m)) + 2.0 * static_cast<double>(cp.nesting) * std::log(cp.eta_rc_bar);
  const double log_t = std::log(cp.length_km / cp.fiber_speed_km_s) +
                       static_cast<double>(cp.nesting) * std::log(1.5) - log_den;
  if (!std::isfinite(log_t) || log_t > std::log(std::numeric_limits<double>::max())) return TotalTime::unreachable();
  return TotalTime::finite(std::exp(log_t));
}

TotalTime total_time_exact(const ChainParams& cp, const LinkParams& lp) {
  ChainParams routed = cp;
  for (double& p : routed.swap_success) p *= cp.eta_rc_bar * cp.eta_rc_bar;
  return total_time(routed, link_success_multiplexed(lp), false);
}

LinkQuality quality_from_visibility(double v) {
  return {v, (3.0 * v + 1.0) / 4.0, quantum::kTsirelson * v};
}

LinkQuality product_link_quality(double v_a, double v_b) {
  require_probability(v_a, "visibility");
  require_probability(v_b, "visibility");
  const LinkQuality a = quality_from_visibility(v_a), b = quality_from_visibility(v_b);
  return {v_a * v_b, (1.0 + (4.0 * a.fidelity - 1.0) * (4.0 * b.fidelity - 1.0) / 3.0) / 4.0,
          a.bell * b.bell / quantum::kTsirelson};
}

CompositeLinkQuality composite_link_quality(const std::vector<double>& v_a, const std::vector<double>& v_b,
                                            const std::vector<double>& p_a, const std::vector<double>& p_b,
                                            double zeta) {
  const std::size_t m = v_a.size();
  if (m == 0 || v_b.size() != m || p_a.size() != m || p_b.size() != m)
    throw DomainError("per-channel inputs must share a non-zero length");
  require_probability(zeta, "zeta");
  double sa = 0, sb = 0, sab = 0, wa = 0, wb = 0, wab = 0;
  for (std::size_t i = 0; i < m; ++i) {
    require_probability(v_a[i], "visibility");
    require_probability(v_b[i], "visibility");
    if (!(p_a[i] >= 0.0 && p_b[i] >= 0.0)) throw DomainError("weights must be non-negative");
    sa += p_a[i];
    sb += p_b[i];
    sab += p_a[i] * p_b[i];
    wa += p_a[i] * v_a[i];
    wb += p_b[i] * v_b[i];
    wab += zeta * p_a[i] * v_a[i] * p_b[i] * v_b[i];
  }
  if (!(sa > 0.0 && sb > 0.0 && sab > 0.0)) throw UndefinedEstimate("no channel carries weight on both ends");
  CompositeLinkQuality out;
  out.v_a = wa / sa;
  out.v_b = wb / sb;
  out.product = product_link_quality(out.v_a, out.v_b);
  out.exact = quality_from_visibility(wab / sab);
  out.normalization = sa * sb / sab;
  return out;
}

double bsm_success_probability(const quantum::PureTwoQubitState& a, const quantum::PureTwoQubitState& b) {
  double p = 0.0;
  for (const auto& br : bsm_branches(a, b)) p += br.probability;
  return p;
}

double bsm_amplitude_prefactor(double chi, double theta) {
  require_probability(chi, "chi");
  return chi * std::sin(2.0 * theta) / std::sqrt(2.0);
}

BsmResult bsm_project(const quantum::PureTwoQubitState& a, const quantum::PureTwoQubitState& b, sim::Rng& rng) {
  const auto branches = bsm_branches(a, b);
  BsmResult out;
  for (const auto& br : branches) out.success_probability += br.probability;
  double u = rng.uniform();
  for (const auto& br : branches) {
    if (u >= br.probability) {
      u -= br.probability;
      continue;
    }
    Eigen::Vector4cd mem = br.memories / std::sqrt(br.probability);
    if (br.odd) {
      mem[2] = -mem[2];  // Z on memory A: |-> picks up a sign
      mem[3] = -mem[3];
    }
    out.success = true;
    out.phase_corrected = br.odd;
    out.memories = quantum::PureTwoQubitState(mem / mem.norm());
    return out;
  }
  return out;
}

}  // namespace muxlink::repeater
