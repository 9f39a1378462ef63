#include "csws/sampling.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>

#include "csws/parallel.hpp"

namespace csws {

namespace {

const boost::math::normal_distribution<double> kStdNormal;

double norm_cdf(double x) { return boost::math::cdf(kStdNormal, x); }
double norm_pdf(double x) { return boost::math::pdf(kStdNormal, x); }
double norm_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

void check_spec(const RandomEntrySpec& spec) {
  const int d = spec.dim();
  if (d < 1 || spec.constant.cols() != d) {
    throw std::invalid_argument("RandomEntrySpec: constant matrix must be d x d");
  }
  if (!all_finite(spec.constant)) {
    throw std::invalid_argument("RandomEntrySpec: constant matrix must be finite");
  }
  for (const RandomEntry& e : spec.entries) {
    if (e.row < 0 || e.row >= d || e.col < 0 || e.col >= d) {
      throw std::invalid_argument("RandomEntrySpec: entry coordinates out of range");
    }
    if (!std::isfinite(e.a) || !std::isfinite(e.b)) {
      throw std::invalid_argument("RandomEntrySpec: entry coefficients must be finite");
    }
  }
  if (spec.dist == ShockDist::lognormal && !(spec.log_sd > 0.0)) {
    throw std::invalid_argument("RandomEntrySpec: lognormal shock needs log_sd > 0");
  }
}

}  // namespace

double RandomEntrySpec::shock(double z) const {
  return dist == ShockDist::normal ? z : std::exp(log_mean + log_sd * z);
}

void RandomEntrySpec::realize(double shock_value, Mat& out) const {
  out = constant;
  for (const RandomEntry& e : entries) {
    out(e.row, e.col) = e.transform == EntryTransform::affine
                            ? e.a + e.b * shock_value
                            : std::exp(e.a + e.b * shock_value);
  }
}

DisturbanceSet partition_sampling(const RandomEntrySpec& spec, int n_cells) {
  check_spec(spec);
  if (n_cells < 1) {
    throw std::invalid_argument("partition_sampling: n_cells must be >= 1");
  }
  if (spec.entries.size() != 1) {
    throw std::invalid_argument(
        "partition_sampling: exactly one random entry is supported "
        "(1-dimensional shock)");
  }
  const RandomEntry& entry = spec.entries[0];
  if (spec.dist == ShockDist::lognormal &&
      entry.transform == EntryTransform::exp_affine) {
    throw std::invalid_argument(
        "partition_sampling: no closed-form cell means for exp of a "
        "lognormal shock");
  }

  // Cell k covers shock quantiles (k/n, (k+1)/n]; q holds the standard
  // normal cell boundaries with q[0] = -inf, q[n] = +inf implied.
  std::vector<double> q(n_cells + 1);
  q[0] = -std::numeric_limits<double>::infinity();
  q[n_cells] = std::numeric_limits<double>::infinity();
  for (int k = 1; k < n_cells; ++k) {
    q[k] = norm_quantile(static_cast<double>(k) / n_cells);
  }
  auto cdf01 = [](double x) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return norm_cdf(x);
  };
  auto pdf01 = [](double x) { return std::isinf(x) ? 0.0 : norm_pdf(x); };

  DisturbanceSet out;
  out.weights = Vec::Constant(n_cells, 1.0 / n_cells);
  out.matrices.reserve(n_cells);
  Mat w;
  for (int k = 0; k < n_cells; ++k) {
    const double lo = q[k], hi = q[k + 1];
    double entry_mean;
    if (spec.dist == ShockDist::normal) {
      // E[Z | lo < Z <= hi] = (pdf(lo) - pdf(hi)) / cell probability.
      const double z_mean = (pdf01(lo) - pdf01(hi)) * n_cells;
      if (entry.transform == EntryTransform::affine) {
        entry_mean = entry.a + entry.b * z_mean;
      } else {
        // E[exp(a + b Z) | cell] = exp(a + b^2/2) (Phi(hi-b) - Phi(lo-b)) / prob.
        entry_mean = std::exp(entry.a + 0.5 * entry.b * entry.b) *
                     (cdf01(hi - entry.b) - cdf01(lo - entry.b)) * n_cells;
      }
    } else {
      // Lognormal shock X = exp(u + s Z): E[X | cell] in closed form with
      // the boundaries shifted by s.
      const double x_mean =
          std::exp(spec.log_mean + 0.5 * spec.log_sd * spec.log_sd) *
          (cdf01(hi - spec.log_sd) - cdf01(lo - spec.log_sd)) * n_cells;
      entry_mean = entry.a + entry.b * x_mean;
    }
    // The atom carries the conditional mean of the entry itself.
    spec.realize(0.0, w);
    w(entry.row, entry.col) = entry_mean;
    out.matrices.push_back(w);
  }
  return out;
}

namespace {

// Antithetic draw discipline shared by atoms, paths and subsims: member
// 2j takes +z_j, member 2j+1 takes -z_j.
inline double paired_normal(std::uint64_t seed, rng::Stream stream, int index,
                            std::uint32_t i1, std::uint32_t i2,
                            bool antithetic) {
  if (!antithetic) {
    return rng::normal(seed, stream, static_cast<std::uint32_t>(index), i1, i2);
  }
  const double z =
      rng::normal(seed, stream, static_cast<std::uint32_t>(index / 2), i1, i2);
  return index % 2 == 0 ? z : -z;
}

}  // namespace

DisturbanceSet monte_carlo_sampling(const RandomEntrySpec& spec, int n,
                                    std::uint64_t seed, bool antithetic) {
  check_spec(spec);
  if (n < 1) throw std::invalid_argument("monte_carlo_sampling: n must be >= 1");
  if (antithetic && n % 2 != 0) {
    throw std::invalid_argument(
        "monte_carlo_sampling: antithetic pairing needs an even atom count");
  }
  DisturbanceSet out;
  out.weights = Vec::Constant(n, 1.0 / n);
  out.matrices.resize(n);
  for (int k = 0; k < n; ++k) {
    const double z = paired_normal(seed, rng::kAtoms, k, 0, 0, antithetic);
    spec.realize(spec.shock(z), out.matrices[k]);
  }
  return out;
}

PathBundle::PathBundle(int n_path, int n_dec, int dim, Vec start)
    : n_path_(n_path), n_dec_(n_dec), dim_(dim), start_(std::move(start)),
      states_(static_cast<std::size_t>(n_path) * n_dec * dim),
      disturb_(static_cast<std::size_t>(n_path) * (n_dec - 1) * dim * dim) {}

PathBundle gen_paths(const Vec& start, const RandomEntrySpec& spec, int n_path,
                     int n_dec, std::uint64_t seed, bool antithetic) {
  check_spec(spec);
  const int d = spec.dim();
  if (start.size() != d) {
    throw std::invalid_argument("gen_paths: start dimension mismatch");
  }
  if (n_dec < 2) throw std::invalid_argument("gen_paths: n_dec must be >= 2");
  if (n_path < 1) throw std::invalid_argument("gen_paths: n_path must be >= 1");
  if (antithetic && n_path % 2 != 0) {
    throw std::invalid_argument(
        "gen_paths: antithetic pairing needs an even path count");
  }
  PathBundle bundle(n_path, n_dec, d, start);
  parallel_for(n_path, [&](std::int64_t i) {
    Mat w(d, d);
    double* state = bundle.mutable_state(static_cast<int>(i), 0);
    for (int c = 0; c < d; ++c) state[c] = start[c];
    for (int t = 0; t + 1 < n_dec; ++t) {
      const double z = paired_normal(seed, rng::kPath, static_cast<int>(i),
                                     static_cast<std::uint32_t>(t), 0,
                                     antithetic);
      spec.realize(spec.shock(z), w);
      double* wout = bundle.mutable_disturbance(static_cast<int>(i), t);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) wout[r * d + c] = w(r, c);
      }
      const double* cur = bundle.state(static_cast<int>(i), t);
      double* next = bundle.mutable_state(static_cast<int>(i), t + 1);
      for (int r = 0; r < d; ++r) next[r] = dot_n(wout + r * d, cur, d);
    }
  });
  return bundle;
}

SubsimBundle::SubsimBundle(RandomEntrySpec spec, int n_subsim, int n_path,
                           int n_steps, std::uint64_t seed, bool antithetic)
    : spec_(std::move(spec)), n_subsim_(n_subsim), n_path_(n_path),
      n_steps_(n_steps), seed_(seed), antithetic_(antithetic) {}

double SubsimBundle::shock_normal(int k, int i, int t) const {
  return paired_normal(seed_, rng::kSubsim, k, static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(t), antithetic_);
}

void SubsimBundle::matrix(int k, int i, int t, Mat& out) const {
  spec_.realize(spec_.shock(shock_normal(k, i, t)), out);
}

SubsimBundle gen_subsim(const RandomEntrySpec& spec, int n_subsim, int n_path,
                        int n_dec, std::uint64_t seed, bool antithetic) {
  check_spec(spec);
  if (n_subsim < 1) {
    throw std::invalid_argument("gen_subsim: n_subsim must be >= 1");
  }
  if (antithetic && n_subsim % 2 != 0) {
    throw std::invalid_argument(
        "gen_subsim: antithetic pairing needs an even subsim count");
  }
  if (n_dec < 2) throw std::invalid_argument("gen_subsim: n_dec must be >= 2");
  return SubsimBundle(spec, n_subsim, n_path, n_dec - 1, seed, antithetic);
}

}  // namespace csws
