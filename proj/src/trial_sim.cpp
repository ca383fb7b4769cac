#include "muxlink/trial_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "muxlink/errors.hpp"

namespace muxlink::sim {

namespace {

constexpr double kMassTol = 1e-12;

std::size_t index_of(Detector d) { return static_cast<std::size_t>(d); }

}  // namespace

void TimingConfig::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("timing.rate must be positive");
  if (max_trials == 0) throw DomainError("timing.max_trials must be positive");
  if (!(storage_us >= 0.0) || !std::isfinite(storage_us)) throw DomainError("timing.storage_us must be >= 0");
  if (!(lifetime_us > 0.0) || !std::isfinite(lifetime_us)) throw DomainError("timing.lifetime_us must be positive");
}

SourceParams apply_decay(const SourceParams& p, const TimingConfig& t) {
  t.validate();
  SourceParams out = p;
  const double x = t.storage_us / t.lifetime_us;
  out.gamma = p.gamma * std::exp(-x * x);
  return out;
}

InterfaceParams apply_decay(const InterfaceParams& ip, const TimingConfig& t) {
  InterfaceParams out = ip;
  for (auto& s : out.sources) s = apply_decay(s, t);
  return out;
}

std::uint64_t SourceTally::matched(PolarizationBasis basis) const noexcept {
  return basis == PolarizationBasis::kRL ? xy + yx : xx + yy;
}

std::uint64_t SourceTally::mismatched(PolarizationBasis basis) const noexcept {
  return basis == PolarizationBasis::kRL ? xx + yy : xy + yx;
}

SourceTally& SourceTally::operator+=(const SourceTally& o) noexcept {
  stokes_x += o.stokes_x;
  stokes_y += o.stokes_y;
  xx += o.xx;
  xy += o.xy;
  yx += o.yx;
  yy += o.yy;
  return *this;
}

std::uint64_t CountsTable::matched_total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& s : sources) n += s.matched(basis);
  return n;
}

std::uint64_t CountsTable::mismatched_total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& s : sources) n += s.mismatched(basis);
  return n;
}

std::uint64_t CountsTable::stokes_total() const noexcept {
  std::uint64_t n = 0;
  for (const auto& s : sources) n += s.stokes();
  return n;
}

CountsTable& CountsTable::merge(const CountsTable& other) {
  if (other.basis != basis || other.sources.size() != sources.size())
    throw DomainError("cannot merge counts from different bases or interfaces");
  for (std::size_t i = 0; i < sources.size(); ++i) sources[i] += other.sources[i];
  cycles += other.cycles;
  trials += other.trials;
  return *this;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

CycleModel::CycleModel(const InterfaceParams& ip, const TimingConfig& t, PolarizationBasis basis)
    : basis_(basis), max_trials_(t.max_trials) {
  ip.validate();
  t.validate();
  const InterfaceParams decayed = apply_decay(ip, t);
  stokes_.resize(ip.m());
  antistokes_.resize(ip.m());
  cumulative_.reserve(2 * ip.m());

  double survive = 1.0;  // no source below i has clicked this trial
  double acc = 0.0;
  for (std::size_t i = 0; i < ip.m(); ++i) {
    const SourceParams& s = decayed.sources[i];
    detection::ProbTableRow row;
    try {
      row = detection::prob_table(s, basis, ip.accidentals);
    } catch (const RegimeError& e) {
      throw ConfigError("interface.sources[" + std::to_string(i) + "]", e.what());
    }
    if (row.stokes() > 1.0 + kMassTol)
      throw ConfigError("interface.sources[" + std::to_string(i) + "]", "Stokes click probabilities sum above 1");
    stokes_[i] = {row.stokes_x, row.stokes_y};
    const auto cond = row.conditional();
    for (int sd = 0; sd < 2; ++sd) {
      const double total = cond[sd][0] + cond[sd][1];
      if (total > 1.0 + kMassTol)
        throw ConfigError("interface.sources[" + std::to_string(i) + "]",
                          "anti-Stokes conditional probabilities sum above 1");
      antistokes_[i][sd] = {cond[sd][0] * s.eta_rc, cond[sd][1] * s.eta_rc};
    }
    acc += survive * row.stokes_x;
    cumulative_.push_back(acc);
    acc += survive * row.stokes_y;
    cumulative_.push_back(acc);
    survive *= 1.0 - row.stokes();
  }
  fire_ = 1.0 - survive;
  log_no_fire_ = std::log1p(-fire_);
}

std::optional<Detector> CycleModel::sample_antistokes(Rng& rng, std::size_t source, Detector stokes) const {
  const auto& p = antistokes_[source][index_of(stokes)];
  const double u = rng.uniform();
  if (u < p[0]) return Detector::kX;
  if (u < p[0] + p[1]) return Detector::kY;
  return std::nullopt;
}

CycleOutcome CycleModel::sample(Rng& rng) const {
  CycleOutcome out;
  if (!(fire_ > 0.0)) {
    out.trials_consumed = max_trials_;
    return out;
  }
  // Trials up to and including the first click: P(K > k) = (1 - q)^k.
  std::uint64_t k = 1;
  if (fire_ < 1.0) {
    const double kk = std::ceil(std::log(rng.uniform_open_zero()) / log_no_fire_);
    if (!(kk <= static_cast<double>(max_trials_))) {
      out.trials_consumed = max_trials_;
      return out;
    }
    k = kk < 1.0 ? 1 : static_cast<std::uint64_t>(kk);
  }
  out.trials_consumed = k;

  const double u = rng.uniform() * cumulative_.back();
  std::size_t slot = 0;
  while (slot + 1 < cumulative_.size() && !(u < cumulative_[slot])) ++slot;
  // Skip zero-width slots that can only be hit by rounding at the boundary.
  while (slot > 0 && cumulative_[slot] == cumulative_[slot - 1]) --slot;
  const std::size_t source = slot / 2;
  const Detector d = slot % 2 == 0 ? Detector::kX : Detector::kY;
  out.fired_source = source;
  out.stokes_detector = d;
  out.antistokes_detector = sample_antistokes(rng, source, d);
  return out;
}

CycleOutcome CycleModel::sample_naive(Rng& rng) const {
  CycleOutcome out;
  for (std::uint64_t trial = 1; trial <= max_trials_; ++trial) {
    for (std::size_t i = 0; i < stokes_.size(); ++i) {
      const double u = rng.uniform();
      std::optional<Detector> d;
      if (u < stokes_[i][0])
        d = Detector::kX;
      else if (u < stokes_[i][0] + stokes_[i][1])
        d = Detector::kY;
      if (!d) continue;
      out.trials_consumed = trial;
      out.fired_source = i;
      out.stokes_detector = d;
      out.antistokes_detector = sample_antistokes(rng, i, *d);
      return out;
    }
  }
  out.trials_consumed = max_trials_;
  return out;
}

void tally(CountsTable& table, const CycleOutcome& o) {
  ++table.cycles;
  table.trials += o.trials_consumed;
  if (!o.fired_source) return;
  SourceTally& s = table.sources.at(*o.fired_source);
  const bool sx = *o.stokes_detector == Detector::kX;
  (sx ? s.stokes_x : s.stokes_y) += 1;
  if (!o.antistokes_detector) return;
  const bool tx = *o.antistokes_detector == Detector::kX;
  if (sx)
    (tx ? s.xx : s.xy) += 1;
  else
    (tx ? s.yx : s.yy) += 1;
}

CountsTable run_block(const CycleModel& model, std::uint64_t seed, std::uint64_t block, std::uint64_t cycles,
                      Sampler sampler) {
  CountsTable table;
  table.basis = model.basis();
  table.sources.resize(model.m());
  Rng rng(block_seed(seed, block));
  for (std::uint64_t c = 0; c < cycles; ++c)
    tally(table, sampler == Sampler::kFast ? model.sample(rng) : model.sample_naive(rng));
  return table;
}

CountsTable run_simulation_serial(std::uint64_t seed, const InterfaceParams& ip, const TimingConfig& t,
                                  PolarizationBasis basis, std::uint64_t cycles, Sampler sampler) {
  if (cycles == 0) throw DomainError("cycles must be >= 1");
  const CycleModel model(ip, t, basis);
  CountsTable total;
  total.basis = basis;
  total.sources.resize(model.m());
  const std::uint64_t blocks = (cycles + kBlockCycles - 1) / kBlockCycles;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t n = std::min(kBlockCycles, cycles - b * kBlockCycles);
    total.merge(run_block(model, seed, b, n, sampler));
  }
  return total;
}

}  // namespace muxlink::sim
