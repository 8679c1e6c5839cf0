#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace rmt {

using Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Error hierarchy maps onto process exit codes:
//   ConfigError -> 1 (usage), NumericalError -> 2, InvariantError -> 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One complex-conjugate eigenvalue pair x +- iy, stored as its upper-half
// representative only (y > 0). The conjugate is implicit; storing both would
// invite inconsistency for spectra of real matrices.
struct ComplexPair {
  double x = 0.0;
  double y = 0.0;
};

// Full eigenvalue set of one sampled matrix, with the real/complex split
// taken from the quasi-triangular block structure (never from thresholding
// imaginary parts).
struct Spectrum {
  std::vector<double> real_eigs;
  std::vector<ComplexPair> complex_pairs;
  Index n = 0;

  bool cardinality_ok() const {
    return real_eigs.size() + 2 * complex_pairs.size() ==
           static_cast<std::size_t>(n);
  }
};

inline Index count_real(const Spectrum& s) {
  return static_cast<Index>(s.real_eigs.size());
}

// Integer-exact 1-D histogram over [lo, hi). Out-of-range values go to an
// overflow tally so outliers (e.g. a Perron-Frobenius eigenvalue) stay
// auditable instead of vanishing. `weight` counts source matrices.
class Histogram1D {
 public:
  Histogram1D(double lo, double hi, int bins)
      : lo_(lo), hi_(hi), counts_(static_cast<std::size_t>(bins), 0) {
    if (!(lo < hi)) throw ConfigError("Histogram1D: requires lo < hi");
    if (bins < 1) throw ConfigError("Histogram1D: requires bins >= 1");
  }

  void accumulate(double value) {
    if (value >= lo_ && value < hi_) {
      auto b = static_cast<std::size_t>((value - lo_) / binwidth());
      if (b >= counts_.size()) b = counts_.size() - 1;  // rounding at hi edge
      ++counts_[b];
    } else {
      ++overflow_;
    }
  }

  void add_weight(std::int64_t matrices) { weight_ += matrices; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int bins() const { return static_cast<int>(counts_.size()); }
  double binwidth() const { return (hi_ - lo_) / bins(); }
  double edge(int i) const { return lo_ + i * binwidth(); }
  double center(int i) const { return lo_ + (i + 0.5) * binwidth(); }
  std::int64_t count(int i) const { return counts_[static_cast<std::size_t>(i)]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t overflow() const { return overflow_; }
  std::int64_t weight() const { return weight_; }

  std::int64_t total_in_range() const {
    std::int64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  bool same_shape(const Histogram1D& o) const {
    return lo_ == o.lo_ && hi_ == o.hi_ && counts_.size() == o.counts_.size();
  }

 private:
  double lo_, hi_;
  std::vector<std::int64_t> counts_;
  std::int64_t overflow_ = 0;
  std::int64_t weight_ = 0;

  friend Histogram1D merge(const Histogram1D& a, const Histogram1D& b);
};

// Exact integer merge; commutative and associative, so reductions are
// scheduler-independent.
inline Histogram1D merge(const Histogram1D& a, const Histogram1D& b) {
  if (!a.same_shape(b))
    throw ConfigError("histogram merge: shape mismatch (lo, hi, bins)");
  Histogram1D out = a;
  for (std::size_t i = 0; i < out.counts_.size(); ++i)
    out.counts_[i] += b.counts_[i];
  out.overflow_ += b.overflow_;
  out.weight_ += b.weight_;
  return out;
}

struct DensitySamples {
  std::vector<double> x;    // bin centers
  std::vector<double> rho;  // density value per bin
  double binwidth = 0.0;
};

enum class Normalization { unit_mass, per_matrix };

// unit_mass: sum(rho) * binwidth == 1 over in-range counts.
// per_matrix: counts / (weight * binwidth * count_scale), i.e. density per
// eigenvalue per matrix when count_scale = n.
inline DensitySamples to_density(const Histogram1D& h, Normalization norm,
                                 double count_scale = 1.0) {
  DensitySamples out;
  out.binwidth = h.binwidth();
  const std::int64_t total = h.total_in_range();
  double denom;
  if (norm == Normalization::unit_mass) {
    if (total <= 0)
      throw NumericalError("to_density: empty histogram has no unit-mass normalization");
    denom = static_cast<double>(total) * out.binwidth;
  } else {
    if (h.weight() <= 0)
      throw NumericalError("to_density: per_matrix normalization needs weight > 0");
    denom = static_cast<double>(h.weight()) * out.binwidth * count_scale;
  }
  out.x.reserve(h.bins());
  out.rho.reserve(h.bins());
  for (int i = 0; i < h.bins(); ++i) {
    out.x.push_back(h.center(i));
    out.rho.push_back(static_cast<double>(h.count(i)) / denom);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ensemble descriptions

enum class EnsembleKind {
  ginibre,
  spherical_product,
  rajan_abbott,
  ginibre_diffusion,
  regular_digraph,
};

struct SphericalParams {
  int k = 1;  // number of A * B^{-1} factors
};

struct RajanAbbottParams {
  double f_e = 0.8;     // fraction of excitatory columns
  double sigma_e = 0.15;
  double sigma_i = 0.9;
};

struct DiffusionParams {
  double t = 1.0;  // diffusion time, diffusion constant 1/n
};

struct GraphParams {
  int k = 2;  // in- and out-degree
};

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::ginibre;
  int n = 0;
  std::variant<std::monostate, SphericalParams, RajanAbbottParams,
               DiffusionParams, GraphParams>
      params;
};

inline const char* ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::ginibre: return "ginibre";
    case EnsembleKind::spherical_product: return "spherical_product";
    case EnsembleKind::rajan_abbott: return "rajan_abbott";
    case EnsembleKind::ginibre_diffusion: return "ginibre_diffusion";
    case EnsembleKind::regular_digraph: return "regular_digraph";
  }
  return "?";
}

inline EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "ginibre") return EnsembleKind::ginibre;
  if (s == "spherical_product" || s == "spherical") return EnsembleKind::spherical_product;
  if (s == "rajan_abbott") return EnsembleKind::rajan_abbott;
  if (s == "ginibre_diffusion" || s == "diffusion") return EnsembleKind::ginibre_diffusion;
  if (s == "regular_digraph" || s == "digraph") return EnsembleKind::regular_digraph;
  throw ConfigError("unknown ensemble kind: '" + s + "'");
}

inline int excitatory_columns(double f_e, int n) {
  return static_cast<int>(std::llround(f_e * n));
}

// Per-kind parameter preconditions; throws ConfigError naming the offender.
inline void validate(const EnsembleSpec& spec) {
  if (spec.n < 1) throw ConfigError("ensemble: n must be >= 1");
  switch (spec.kind) {
    case EnsembleKind::ginibre:
      break;
    case EnsembleKind::spherical_product: {
      const auto* p = std::get_if<SphericalParams>(&spec.params);
      if (!p) throw ConfigError("spherical_product: missing params (k)");
      if (p->k < 1) throw ConfigError("spherical_product: k must be >= 1");
      if (spec.n < 2) throw ConfigError("spherical_product: n must be >= 2");
      break;
    }
    case EnsembleKind::rajan_abbott: {
      const auto* p = std::get_if<RajanAbbottParams>(&spec.params);
      if (!p) throw ConfigError("rajan_abbott: missing params (f_e, sigma_e, sigma_i)");
      if (!(p->f_e > 0.0 && p->f_e < 1.0))
        throw ConfigError("rajan_abbott: f_e must lie in (0, 1)");
      if (!(p->sigma_e > 0.0) || !(p->sigma_i > 0.0))
        throw ConfigError("rajan_abbott: sigma_e and sigma_i must be positive");
      const int ne = excitatory_columns(p->f_e, spec.n);
      if (ne < 1 || ne > spec.n - 1)
        throw ConfigError("rajan_abbott: round(f_e*n) must lie in [1, n-1]");
      break;
    }
    case EnsembleKind::ginibre_diffusion: {
      const auto* p = std::get_if<DiffusionParams>(&spec.params);
      if (!p) throw ConfigError("ginibre_diffusion: missing params (t)");
      if (!(p->t > 0.0)) throw ConfigError("ginibre_diffusion: t must be > 0");
      if (spec.n % 2 != 0) throw ConfigError("ginibre_diffusion: n must be even");
      break;
    }
    case EnsembleKind::regular_digraph: {
      const auto* p = std::get_if<GraphParams>(&spec.params);
      if (!p) throw ConfigError("regular_digraph: missing params (k)");
      if (p->k < 2) throw ConfigError("regular_digraph: k must be >= 2");
      if (p->k >= spec.n) throw ConfigError("regular_digraph: k must be < n");
      break;
    }
  }
}

}  // namespace rmt
