#ifndef QBODY_MEASURES_HPP
#define QBODY_MEASURES_HPP

// Volumes, random sampling of Q and its strata, and labelled grids on
// sections of the cube.
//
// Randomness: the sample index range is cut into blocks of 2^16; block b
// draws from std::mt19937_64 seeded with splitmix64 of (seed, b). Workers
// take whole blocks, so results depend on (seed, samples) only and not on
// the number of workers.

#include "qbody/boundary.hpp"
#include "qbody/core.hpp"
#include "qbody/membership.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace qbody {

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  unsigned workers = 1;
};

inline constexpr std::size_t kBlockSize = std::size_t{1} << 16;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Generator for block b of a run with the given seed.
class BlockRng {
 public:
  BlockRng(std::uint64_t seed, std::uint64_t block) : gen_(splitmix64(splitmix64(seed) ^ splitmix64(~block))) {}

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 gen_;
};

namespace detail {

/// Runs body(block, begin, end) for every block of [0, samples) on `workers`
/// threads; each thread takes blocks w, w + workers, ...
inline void for_blocks(const SamplerConfig& cfg,
                       const std::function<void(std::uint64_t, std::size_t, std::size_t)>& body) {
  const std::size_t blocks = (cfg.samples + kBlockSize - 1) / kBlockSize;
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(blocks)));
  auto run = [&](unsigned w) {
    for (std::size_t b = w; b < blocks; b += workers) {
      body(b, b * kBlockSize, std::min(cfg.samples, (b + 1) * kBlockSize));
    }
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Volumes

enum class Body { Q, CL, Elliptope3 };

inline const char* to_string(Body b) {
  switch (b) {
    case Body::Q: return "q";
    case Body::CL: return "cl";
    case Body::Elliptope3: return "elliptope";
  }
  return "unknown";
}

struct VolumeEstimate {
  double fraction = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
};

inline bool in_elliptope3(double x, double y, double z) {
  return 1 - x * x - y * y - z * z + 2 * x * y * z >= 0;
}

/// Fraction of uniform points of the ambient cube ([-1,1]^4, or [-1,1]^3 for
/// the elliptope) that lie in the body.
inline VolumeEstimate mc_volume(Body body, const SamplerConfig& cfg) {
  if (cfg.samples == 0) throw std::invalid_argument("samples must be positive");
  const std::size_t blocks = (cfg.samples + kBlockSize - 1) / kBlockSize;
  std::vector<std::size_t> hits(blocks, 0);
  detail::for_blocks(cfg, [&](std::uint64_t b, std::size_t begin, std::size_t end) {
    BlockRng rng(cfg.seed, b);
    std::size_t n = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (body == Body::Elliptope3) {
        const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1), z = rng.uniform(-1, 1);
        n += in_elliptope3(x, y, z);
      } else {
        Vec4 v;
        for (int k = 0; k < 4; ++k) v[k] = rng.uniform(-1, 1);
        const Correlation c(v);
        n += body == Body::Q ? detail::semialg_margin(c) >= 0 : member_classical(c, Tolerance{}).margin >= 0;
      }
    }
    hits[b] = n;
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  VolumeEstimate out;
  out.samples = cfg.samples;
  out.fraction = static_cast<double>(total) / static_cast<double>(cfg.samples);
  out.stderr_ = std::sqrt(out.fraction * (1 - out.fraction) / static_cast<double>(cfg.samples));
  return out;
}

/// V(Q)/V(N) in closed form.
inline double exact_volume_ratio() { return 3.0 * kPi * kPi / 32.0; }

/// V(Q)/V(N) by integrating the Jacobian prod (pi/2) cos(pi x_ij / 2) of the
/// pushout over C. C = 2H B with B the unit l1 ball and |det 2H| = 16, so the
/// ratio is the integral of the Jacobian at 2Hy over B. Each of the 16
/// orthant simplices of B is mapped from [0,1]^4 by
///   y = (abcd, abc(1-d), ab(1-c), a(1-b)),  dy = a^3 b^2 c,
/// and integrated with an N-point Gauss-Legendre rule per axis.
template <unsigned N = 16>
double jacobian_volume_ratio() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  // Nodes and weights on [0, 1].
  std::vector<double> x, w;
  const auto& abs = Rule::abscissa();
  const auto& wts = Rule::weights();
  for (std::size_t k = 0; k < abs.size(); ++k) {
    for (double s : {-1.0, 1.0}) {
      if (abs[k] == 0 && s < 0) continue;
      x.push_back(0.5 * (1 + s * abs[k]));
      w.push_back(0.5 * wts[k]);
    }
  }
  const Mat4 twoH = 2.0 * hadamard();
  double total = 0;
  for (int orthant = 0; orthant < 16; ++orthant) {
    Vec4 sign;
    for (int k = 0; k < 4; ++k) sign[k] = (orthant >> k) & 1 ? -1.0 : 1.0;
    for (std::size_t ia = 0; ia < x.size(); ++ia) {
      const double a = x[ia];
      for (std::size_t ib = 0; ib < x.size(); ++ib) {
        const double b = x[ib];
        for (std::size_t ic = 0; ic < x.size(); ++ic) {
          const double c = x[ic];
          const double jac = a * a * a * b * b * c * w[ia] * w[ib] * w[ic];
          for (std::size_t id = 0; id < x.size(); ++id) {
            const double d = x[id];
            const Vec4 y(a * b * c * d, a * b * c * (1 - d), a * b * (1 - c), a * (1 - b));
            const Vec4 pt = twoH * sign.cwiseProduct(y);
            double f = 1;
            for (int k = 0; k < 4; ++k) f *= 0.5 * kPi * std::cos(0.5 * kPi * pt[k]);
            total += jac * w[id] * f;
          }
        }
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Sampling

enum class SampleTarget { Cube, CL, QInterior, Q1, Q2, Q3, Q4, Q5 };

inline const char* to_string(SampleTarget t) {
  switch (t) {
    case SampleTarget::Cube: return "cube";
    case SampleTarget::CL: return "cl";
    case SampleTarget::QInterior: return "q_interior";
    case SampleTarget::Q1: return "q1";
    case SampleTarget::Q2: return "q2";
    case SampleTarget::Q3: return "q3";
    case SampleTarget::Q4: return "q4";
    case SampleTarget::Q5: return "q5";
  }
  return "unknown";
}

namespace detail {

// Stratum samples stay this far from neighbouring strata.
inline constexpr double kMinSin = 1e-3;
inline constexpr double kMinFacetCubic = 1e-6;

inline const SymmetryElement& random_symmetry(BlockRng& rng) {
  const auto& g = symmetry_group();
  return g[rng.index(g.size())];
}

inline Correlation draw(SampleTarget target, BlockRng& rng, const Tolerance& tol) {
  auto cube_point = [&] {
    Vec4 v;
    for (int k = 0; k < 4; ++k) v[k] = rng.uniform(-1, 1);
    return Correlation(v);
  };
  switch (target) {
    case SampleTarget::Cube: return cube_point();
    case SampleTarget::CL:
      for (;;) {
        const Correlation c = cube_point();
        if (member_classical(c, tol).margin >= 0) return c;
      }
    case SampleTarget::QInterior:
      for (;;) {
        const Correlation c = cube_point();
        if (semialg_margin(c) > tol.eps_boundary) return c;
      }
    case SampleTarget::Q1: return Correlation(even_vertices()[rng.index(8)]);
    case SampleTarget::Q2:
      // Non-antipodal pairs of even vertices span the 24 edges.
      for (;;) {
        const Vec4& v = even_vertices()[rng.index(8)];
        const Vec4& w = even_vertices()[rng.index(8)];
        if ((v - w).cwiseAbs().sum() != 4.0) continue;
        const double t = rng.uniform(kMinSin, 1 - kMinSin);
        return Correlation((1 - t) * v + t * w);
      }
    case SampleTarget::Q3:
      // alpha = 0 puts c on the facet c11 = 1 on the elliptope surface.
      for (;;) {
        const double b = rng.uniform(-kPi, kPi), g = rng.uniform(-kPi, kPi);
        const AngleTuple t = AngleTuple::from_three(0, b, g);
        if (std::min({std::abs(std::sin(b)), std::abs(std::sin(g)), std::abs(std::sin(t.delta))}) < kMinSin) {
          continue;
        }
        return random_symmetry(rng)(t.point());
      }
    case SampleTarget::Q4:
      // Uniform on the tetrahedron alpha, beta, gamma > 0, sum < pi.
      for (;;) {
        std::array<double, 4> e{};
        double sum = 0;
        for (double& x : e) sum += x = rng.exponential();
        const AngleTuple t = AngleTuple::from_three(kPi * e[0] / sum, kPi * e[1] / sum, kPi * e[2] / sum);
        double m = 1;
        for (double a : t.values()) m = std::min(m, std::abs(std::sin(a)));
        if (m < kMinSin) continue;
        return random_symmetry(rng)(t.point());
      }
    case SampleTarget::Q5:
      for (;;) {
        const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1), z = rng.uniform(-1, 1);
        if (1 - x * x - y * y - z * z + 2 * x * y * z <= kMinFacetCubic) continue;
        // (1, x, y, z) lies on the facet c11 = 1; the group moves it to a random facet.
        return random_symmetry(rng)(Correlation(1, x, y, z));
      }
  }
  throw std::invalid_argument("unknown sample target");
}

}  // namespace detail

inline std::vector<Correlation> sample(SampleTarget target, const SamplerConfig& cfg, const Tolerance& tol = {}) {
  std::vector<Correlation> out(cfg.samples);
  detail::for_blocks(cfg, [&](std::uint64_t b, std::size_t begin, std::size_t end) {
    BlockRng rng(cfg.seed, b);
    for (std::size_t i = begin; i < end; ++i) out[i] = detail::draw(target, rng, tol);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Slices

/// Either some coordinates fixed (the rest free), or the hyperplane
/// normal . c = offset with coordinates s1, s2, s3 in an orthonormal basis of
/// the normal's complement, centred at the foot point offset * n / |n|^2.
struct SliceSpec {
  std::array<std::optional<double>, 4> fixed;
  std::optional<Vec4> normal;
  double offset = 0;
  int resolution = 50;
  double lo = -1;
  double hi = 1;
};

struct SliceRow {
  std::vector<double> coords;
  std::string stratum;
  bool classical = false;
  double g = 0;
  double h = 0;
};

struct SliceTable {
  std::vector<std::string> axes;
  std::vector<SliceRow> rows;
};

inline const std::array<const char*, 4>& coordinate_names() {
  static const std::array<const char*, 4> names{"c11", "c12", "c21", "c22"};
  return names;
}

inline SliceTable slice_grid(const SliceSpec& spec, const Tolerance& tol = {}) {
  if (spec.resolution < 2) throw Error(ErrorKind::InvalidSlice, "resolution must be at least 2");
  if (!(spec.hi > spec.lo)) throw Error(ErrorKind::InvalidSlice, "empty bounding box");

  SliceTable table;
  Vec4 base = Vec4::Zero();
  std::vector<Vec4> dirs;
  if (spec.normal) {
    if (std::any_of(spec.fixed.begin(), spec.fixed.end(), [](const auto& x) { return x.has_value(); })) {
      throw Error(ErrorKind::InvalidSlice, "give either fixed coordinates or a hyperplane");
    }
    const Vec4 n = *spec.normal;
    if (!(n.norm() > 0) || !n.allFinite()) throw Error(ErrorKind::InvalidSlice, "hyperplane normal is zero");
    base = spec.offset * n / n.squaredNorm();
    const Eigen::HouseholderQR<Eigen::Matrix<double, 4, 1>> qr(n);
    const Mat4 q = qr.householderQ();
    for (int k = 1; k < 4; ++k) {
      dirs.push_back(q.col(k));
      table.axes.push_back("s" + std::to_string(k));
    }
  } else {
    for (int k = 0; k < 4; ++k) {
      if (spec.fixed[k]) {
        base[k] = *spec.fixed[k];
      } else {
        dirs.push_back(Vec4::Unit(k));
        table.axes.push_back(coordinate_names()[k]);
      }
    }
    if (dirs.empty() || dirs.size() > 3) throw Error(ErrorKind::InvalidSlice, "need between 1 and 3 free axes");
  }

  const int res = spec.resolution;
  const int free = static_cast<int>(dirs.size());
  std::size_t count = 1;
  for (int k = 0; k < free; ++k) count *= static_cast<std::size_t>(res);
  table.rows.reserve(count);
  std::vector<int> idx(free, 0);
  for (std::size_t n = 0; n < count; ++n) {
    std::size_t rem = n;
    for (int k = free - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % res);
      rem /= res;
    }
    SliceRow row;
    Vec4 v = base;
    for (int k = 0; k < free; ++k) {
      const double s = spec.lo + (spec.hi - spec.lo) * idx[k] / (res - 1);
      row.coords.push_back(s);
      v += s * dirs[k];
    }
    const Correlation c(v);
    try {
      row.stratum = to_string(classify(c, tol));
    } catch (const Error&) {
      row.stratum = "AMBIGUOUS";
    }
    row.classical = member_classical(c, tol).inside;
    row.g = detail::g_poly(v);
    row.h = detail::h_factored(v);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void write_csv(std::ostream& os, const SliceTable& t) {
  for (const auto& a : t.axes) os << a << ',';
  os << "stratum,classical,g,h\n";
  os << std::setprecision(17);
  for (const auto& r : t.rows) {
    for (double x : r.coords) os << x << ',';
    os << r.stratum << ',' << (r.classical ? 1 : 0) << ',' << r.g << ',' << r.h << '\n';
  }
}

}  // namespace qbody

#endif  // QBODY_MEASURES_HPP
