#include "muxlink/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "muxlink/errors.hpp"

namespace muxlink::sim {

namespace {

double visibility_value(double c, double n) {
  if (!(c + n > 0.0)) throw UndefinedEstimate("no coincidences, visibility undefined");
  return (c - n) / (c + n);
}

double chsh_value(const ChshCounts& c) {
  for (const auto& s : c)
    if (!(s.total() > 0.0)) throw UndefinedEstimate("CHSH setting with no coincidences");
  return std::abs(correlation_from_counts(c[0]) - correlation_from_counts(c[1]) + correlation_from_counts(c[2]) +
                  correlation_from_counts(c[3]));
}

// Standard deviation of `stat` over Poisson replicas; replicas the statistic rejects are skipped.
template <class Counts>
double poisson_bootstrap(const Counts& observed, const std::function<double(const Counts&)>& stat,
                         const std::function<void(Counts&, const std::function<double(double)>&)>& resample,
                         const BootstrapOptions& opt) {
  if (opt.replicas < 2) throw DomainError("bootstrap needs at least two replicas");
  Rng rng(opt.seed);
  double mean = 0.0, m2 = 0.0;
  int used = 0;
  auto draw = [&](double mu) {
    if (!(mu > 0.0)) return 0.0;
    std::poisson_distribution<long long> pd(mu);
    return static_cast<double>(pd(rng.engine()));
  };
  for (int b = 0; b < opt.replicas; ++b) {
    Counts replica = observed;
    resample(replica, draw);
    double v;
    try {
      v = stat(replica);
    } catch (const UndefinedEstimate&) {
      continue;
    }
    ++used;
    const double d = v - mean;
    mean += d / used;
    m2 += d * (v - mean);
  }
  return used > 1 ? std::sqrt(m2 / (used - 1)) : 0.0;
}

using Pair = std::array<double, 2>;

}  // namespace

SettingCounts& SettingCounts::operator+=(const SettingCounts& o) noexcept {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) n[i][j] += o.n[i][j];
  return *this;
}

double correlation_from_counts(const SettingCounts& c) {
  const double total = c.total();
  if (!(total > 0.0)) throw UndefinedEstimate("setting with no coincidences");
  return (c.n[0][0] + c.n[1][1] - c.n[0][1] - c.n[1][0]) / total;
}

EstimateWithError estimate_visibility(double matched, double mismatched, const BootstrapOptions& opt) {
  if (matched < 0.0 || mismatched < 0.0) throw DomainError("negative counts");
  const double v = visibility_value(matched, mismatched);
  const double sigma = poisson_bootstrap<Pair>(
      {matched, mismatched}, [](const Pair& p) { return visibility_value(p[0], p[1]); },
      [](Pair& p, const std::function<double(double)>& draw) {
        p[0] = draw(p[0]);
        p[1] = draw(p[1]);
      },
      opt);
  return {std::abs(v), sigma};
}

EstimateWithError estimate_visibility(const CountsTable& counts, const BootstrapOptions& opt) {
  return estimate_visibility(static_cast<double>(counts.matched_total()), static_cast<double>(counts.mismatched_total()),
                             opt);
}

EstimateWithError estimate_chsh(const ChshCounts& counts, const BootstrapOptions& opt) {
  const double s = chsh_value(counts);
  const double sigma = poisson_bootstrap<ChshCounts>(
      counts, [](const ChshCounts& c) { return chsh_value(c); },
      [](ChshCounts& c, const std::function<double(double)>& draw) {
        for (auto& setting : c)
          for (auto& row : setting.n)
            for (auto& x : row) x = draw(x);
      },
      opt);
  return {s, sigma};
}

EstimateWithError estimate_chsh(const std::vector<ChshCounts>& per_source, const BootstrapOptions& opt) {
  if (per_source.empty()) throw UndefinedEstimate("no sources");
  ChshCounts sum{};
  for (const auto& c : per_source)
    for (std::size_t k = 0; k < 4; ++k) sum[k] += c[k];
  return estimate_chsh(sum, opt);
}

EstimateWithError estimate_average_bell(const std::vector<EstimateWithError>& per_source) {
  if (per_source.empty()) throw DomainError("average of zero estimates");
  double sum = 0.0, var = 0.0;
  for (const auto& e : per_source) {
    sum += e.value;
    var += e.sigma * e.sigma;
  }
  const double m = static_cast<double>(per_source.size());
  return {sum / m, std::sqrt(var) / m};
}

ChshCounts expected_chsh_counts(const quantum::DensityMatrix& rho, double total, const quantum::ChshAngles& a) {
  const std::array<quantum::AnalyzerSetting, 4> settings = {{{a.stokes_deg, a.antistokes_deg},
                                                              {a.stokes_deg, a.antistokes_prime_deg},
                                                              {a.stokes_prime_deg, a.antistokes_deg},
                                                              {a.stokes_prime_deg, a.antistokes_prime_deg}}};
  ChshCounts out{};
  for (std::size_t k = 0; k < 4; ++k)
    for (const auto& o : quantum::kAllOutcomes)
      out[k].n[static_cast<int>(o.stokes) - 1][static_cast<int>(o.antistokes) - 1] =
          total * quantum::coincidence_prob(rho, settings[k], o);
  return out;
}

ChshCounts sample_chsh_counts(const quantum::DensityMatrix& rho, std::uint64_t shots, Rng& rng,
                              const quantum::ChshAngles& angles) {
  const ChshCounts p = expected_chsh_counts(rho, 1.0, angles);
  ChshCounts out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const double cum[4] = {p[k].n[0][0], p[k].n[0][0] + p[k].n[0][1],
                           p[k].n[0][0] + p[k].n[0][1] + p[k].n[1][0], 1.0};
    for (std::uint64_t s = 0; s < shots; ++s) {
      const double u = rng.uniform();
      int idx = 0;
      while (idx < 3 && !(u < cum[idx])) ++idx;
      out[k].n[idx / 2][idx % 2] += 1.0;
    }
  }
  return out;
}

quantum::PauliExpectations measure_pauli_expectations(const quantum::DensityMatrix& rho, std::uint64_t shots,
                                                      Rng& rng) {
  const quantum::PauliExpectations exact = quantum::pauli_expectations(rho);
  if (shots == 0) return exact;
  // Index of <P_i (x) P_j> in the 15-vector, i, j in {0..3}, (0, 0) excluded.
  auto at = [](int i, int j) { return 4 * i + j - 1; };
  quantum::PauliExpectations out{};
  std::array<double, 15> hits{};
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j) {
      // Outcome probabilities of the product eigenbasis follow from three expectations.
      const double ei = exact[at(i, 0)], ej = exact[at(0, j)], eij = exact[at(i, j)];
      double prob[4];
      for (int k = 0; k < 4; ++k) {
        const double si = k / 2 == 0 ? 1.0 : -1.0, sj = k % 2 == 0 ? 1.0 : -1.0;
        prob[k] = std::max(0.0, (1.0 + si * ei + sj * ej + si * sj * eij) / 4.0);
      }
      const double norm = prob[0] + prob[1] + prob[2] + prob[3];
      double n[4] = {0, 0, 0, 0};
      for (std::uint64_t s = 0; s < shots; ++s) {
        double u = rng.uniform() * norm;
        int k = 0;
        while (k < 3 && !(u < prob[k])) u -= prob[k++];
        n[k] += 1.0;
      }
      const double total = static_cast<double>(shots);
      out[at(i, j)] = (n[0] - n[1] - n[2] + n[3]) / total;
      out[at(i, 0)] += (n[0] + n[1] - n[2] - n[3]) / total;
      out[at(0, j)] += (n[0] - n[1] + n[2] - n[3]) / total;
      hits[at(i, 0)] += 1.0;
      hits[at(0, j)] += 1.0;
    }
  for (int k = 0; k < 15; ++k)
    if (hits[k] > 0.0) out[k] /= hits[k];
  return out;
}

}  // namespace muxlink::sim
