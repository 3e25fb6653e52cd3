#include "csamr/siggen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csamr/rng.hpp"

namespace csamr::siggen {

namespace {

using std::numbers::pi;

constexpr int kSrrcSpanSymbols = 8;

// Pulse-shapes a symbol stream: full convolution with g, trimmed to L
// samples with the group delay removed, so symbol n peaks at sample
// n*sps + offset.
std::vector<cplx> shape(const std::vector<cplx>& symbols,
                        const std::vector<double>& g, int sps, int length,
                        int offset) {
  std::vector<cplx> out(length, cplx(0.0, 0.0));
  const int delay = static_cast<int>(g.size() - 1) / 2;
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    const cplx c = symbols[n];
    const int base = static_cast<int>(n) * sps + offset - delay;
    for (std::size_t t = 0; t < g.size(); ++t) {
      const int idx = base + static_cast<int>(t);
      if (idx >= 0 && idx < length) out[idx] += c * g[t];
    }
  }
  return out;
}

std::vector<int> draw_symbols(Rng& rng, int count, int m_phases) {
  std::vector<int> s(count);
  for (int& v : s) v = rng.uniform_int(m_phases) + 1;
  return s;
}

std::vector<int> draw_bits(Rng& rng, int count) {
  std::vector<int> s(count);
  for (int& v : s) v = rng.sign();
  return s;
}

void check_bits(const std::vector<int>& bits, std::size_t need,
                const char* which) {
  if (bits.size() < need) {
    throw std::invalid_argument(std::string("symbol override: too few ") +
                                which + " bits");
  }
  for (int b : bits) {
    if (b != 1 && b != -1) {
      throw std::invalid_argument("symbol override bits must be ±1");
    }
  }
}

void apply_carrier(std::vector<cplx>& s, double fc_hz, double fs_hz) {
  const double w = 2.0 * pi * fc_hz / fs_hz;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double ph = w * static_cast<double>(k);
    s[k] *= cplx(std::cos(ph), std::sin(ph));
  }
}

std::vector<cplx> synth_mpsk(const SignalParams& p, int m_phases, Rng& rng,
                             const SymbolOverride* hook) {
  const int sps = p.sps();
  const int L = p.length();
  std::vector<int> idx;
  if (hook && !hook->mpsk_symbols.empty()) {
    idx = hook->mpsk_symbols;
    if (static_cast<int>(idx.size()) != p.n_symbols) {
      throw std::invalid_argument("symbol override: wrong symbol count");
    }
    for (int v : idx) {
      if (v < 1 || v > m_phases) {
        throw std::invalid_argument("symbol override: index out of range");
      }
    }
  } else {
    idx = draw_symbols(rng, p.n_symbols, m_phases);
  }
  std::vector<cplx> symbols(p.n_symbols);
  for (int n = 0; n < p.n_symbols; ++n) {
    const double ph = 2.0 * pi * static_cast<double>(idx[n] - 1) / m_phases;
    symbols[n] = cplx(std::cos(ph), std::sin(ph));
  }
  const std::vector<double> g = srrc_pulse(p.alpha, sps, kSrrcSpanSymbols);
  std::vector<cplx> s = shape(symbols, g, sps, L, 0);
  const double scale = p.amplitude * std::sqrt(static_cast<double>(sps));
  for (cplx& v : s) v *= scale;
  return s;
}

std::vector<cplx> synth_oqpsk(const SignalParams& p, Rng& rng,
                              const SymbolOverride* hook) {
  const int sps = p.sps();
  if (sps % 2 != 0) {
    throw std::invalid_argument("OQPSK needs an even samples-per-symbol");
  }
  const int L = p.length();
  std::vector<int> a, b;
  if (hook && (!hook->a_bits.empty() || !hook->b_bits.empty())) {
    a = hook->a_bits;
    b = hook->b_bits;
    check_bits(a, p.n_symbols, "a");
    check_bits(b, p.n_symbols, "b");
  } else {
    a = draw_bits(rng, p.n_symbols);
    b = draw_bits(rng, p.n_symbols);
  }
  std::vector<cplx> ac(p.n_symbols), bc(p.n_symbols);
  for (int n = 0; n < p.n_symbols; ++n) {
    ac[n] = cplx(static_cast<double>(a[n]), 0.0);
    bc[n] = cplx(static_cast<double>(b[n]), 0.0);
  }
  const std::vector<double> g = srrc_pulse(p.alpha, sps, kSrrcSpanSymbols);
  // Quadrature branch lags the in-phase branch by half a symbol.
  std::vector<cplx> ib = shape(ac, g, sps, L, 0);
  std::vector<cplx> qb = shape(bc, g, sps, L, sps / 2);
  std::vector<cplx> s(L);
  const double scale =
      p.amplitude * std::sqrt(static_cast<double>(sps) / 2.0);
  for (int k = 0; k < L; ++k) {
    s[k] = scale * cplx(ib[k].real(), qb[k].real());
  }
  return s;
}

// Constant-envelope offset modulation: rectangular branch pulses of two
// symbol periods weighted by the quarter-rate sinusoid. The in-phase rect
// covering sample time u (in symbol periods) is centred on an even multiple
// of Ts, the quadrature rect on an odd multiple, which keeps the phase
// continuous (the weighting vanishes wherever its branch bits may switch).
std::vector<cplx> synth_msk(const SignalParams& p, Rng& rng,
                            const SymbolOverride* hook) {
  const int sps = p.sps();
  const int L = p.length();
  const int nbits = p.n_symbols / 2 + 2;
  std::vector<int> a, b;
  if (hook && (!hook->a_bits.empty() || !hook->b_bits.empty())) {
    a = hook->a_bits;
    b = hook->b_bits;
    check_bits(a, nbits, "a");
    check_bits(b, nbits, "b");
  } else {
    a = draw_bits(rng, nbits);
    b = draw_bits(rng, nbits);
  }
  std::vector<cplx> s(L);
  for (int k = 0; k < L; ++k) {
    const double u = static_cast<double>(k) / sps;  // time in symbol periods
    const int ni = static_cast<int>(std::floor((u + 1.0) / 2.0));
    const int nq = static_cast<int>(std::floor(u / 2.0));
    const double theta = 0.5 * pi * u;
    s[k] = p.amplitude * cplx(a[ni] * std::cos(theta), b[nq] * std::sin(theta));
  }
  apply_carrier(s, p.fc_hz, p.fs_hz);
  return s;
}

}  // namespace

std::vector<double> srrc_pulse(double alpha, int sps, int span_symbols) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("SRRC roll-off must lie in (0,1)");
  }
  if (sps < 2) throw std::invalid_argument("SRRC needs sps >= 2");
  if (span_symbols < 6 || span_symbols % 2 != 0) {
    throw std::invalid_argument("SRRC span must be even and >= 6");
  }
  const int half = span_symbols * sps / 2;
  std::vector<double> h(2 * half + 1);
  for (int k = -half; k <= half; ++k) {
    const double tau = static_cast<double>(k) / sps;  // in symbol periods
    double v;
    if (k == 0) {
      v = 1.0 - alpha + 4.0 * alpha / pi;
    } else if (std::abs(std::abs(4.0 * alpha * tau) - 1.0) < 1e-9) {
      // removable singularity at |tau| = 1/(4 alpha)
      const double c = pi / (4.0 * alpha);
      v = (alpha / std::sqrt(2.0)) *
          ((1.0 + 2.0 / pi) * std::sin(c) + (1.0 - 2.0 / pi) * std::cos(c));
    } else {
      const double num = std::sin(pi * tau * (1.0 - alpha)) +
                         4.0 * alpha * tau * std::cos(pi * tau * (1.0 + alpha));
      const double den =
          pi * tau * (1.0 - 16.0 * alpha * alpha * tau * tau);
      v = num / den;
    }
    h[k + half] = v;
  }
  double energy = 0.0;
  for (double v : h) energy += v * v;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : h) v *= scale;
  return h;
}

BasebandRecord synthesize(Modulation mod, const SignalParams& params,
                          const SymbolOverride* hook) {
  params.validate();
  Rng rng(params.seed);
  std::vector<cplx> s;
  switch (mod) {
    case Modulation::Bpsk:
    case Modulation::Qpsk:
    case Modulation::Psk8:
      s = synth_mpsk(params, phase_count(mod), rng, hook);
      apply_carrier(s, params.fc_hz, params.fs_hz);
      break;
    case Modulation::Oqpsk:
      s = synth_oqpsk(params, rng, hook);
      apply_carrier(s, params.fc_hz, params.fs_hz);
      break;
    case Modulation::Msk:
      s = synth_msk(params, rng, hook);
      break;
  }
  BasebandRecord rec;
  rec.samples = std::move(s);
  rec.params = params;
  rec.params.snr_db = kNoiseless;  // no channel applied yet
  rec.modulation = mod;
  rec.achieved_snr_db = kNoiseless;
  return rec;
}

BasebandRecord add_awgn(const BasebandRecord& record, double snr_db,
                        std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return record;
  const double p_sig = mean_power(record.samples);
  const double sigma2 = p_sig / std::pow(10.0, snr_db / 10.0);
  const double s = std::sqrt(sigma2 / 2.0);
  Rng rng(seed);
  BasebandRecord out = record;
  double p_noise = 0.0;
  for (cplx& v : out.samples) {
    const cplx n(s * rng.gaussian(), s * rng.gaussian());
    p_noise += std::norm(n);
    v += n;
  }
  p_noise /= static_cast<double>(out.samples.size());
  out.params.snr_db = snr_db;
  out.achieved_snr_db = 10.0 * std::log10(p_sig / p_noise);
  return out;
}

double mean_power(std::span<const cplx> samples) {
  double p = 0.0;
  for (const cplx& v : samples) p += std::norm(v);
  return samples.empty() ? 0.0 : p / static_cast<double>(samples.size());
}

}  // namespace csamr::siggen
