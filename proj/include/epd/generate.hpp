#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epd/linop.hpp"
#include "epd/rng.hpp"
#include "epd/types.hpp"

namespace epd {

/// A generated (or loaded) recovery problem. The generators fill the metadata
/// fields; identical (types, dims, seed) always reproduce a bit-identical
/// instance. Substream seeds for the matrix, the signal and the noise derive
/// from `seed` via mix_seed, so the three draws never interleave.
template <typename Scalar = double>
struct ProblemInstance {
  LinearOperator<Scalar> op;
  DenseVector<Scalar> b;
  Scalar delta = 0;
  std::optional<DenseVector<Scalar>> x_true;

  int matrix_type = 0;
  int signal_type = 0;
  Index n = 0, m = 0, K = 0;
  Scalar theta = 0;
  std::uint64_t seed = 0;
  std::string name;
};

namespace detail {

// Sylvester Hadamard entry in natural order: (-1)^popcount(i & j).
inline double hadamard_entry(Index i, Index j) {
  return (__builtin_popcountll(static_cast<unsigned long long>(i & j)) & 1) ? -1.0 : 1.0;
}

}  // namespace detail

/// Sensing ensembles. All five build the full n-column ensemble and keep m
/// randomly selected rows (sorted ascending). Types 1, 3 and 4 are then
/// normalized so the selected Gram matrix A A^T has unit spectral norm; the
/// factor lands in the operator's scale field. Type 2 has orthonormal rows by
/// construction and type 5 (partial DCT) is stored implicitly.
///   1: iid standard normal entries
///   2: normal ensemble with rows orthogonalized by a QR factorization
///   3: iid symmetric +-1 entries
///   4: Sylvester Hadamard (n must be a power of two)
///   5: orthonormal type-II DCT, implicit
template <typename Scalar = double>
LinearOperator<Scalar> gen_matrix(int type, Index m, Index n, std::uint64_t seed) {
  using Matrix = DenseMatrix<Scalar>;
  if (m <= 0 || n <= 0 || m > n) throw std::invalid_argument("gen_matrix: need 0 < m <= n");
  Rng rng(seed);

  const auto select_rows = [&](const Matrix& full, const std::vector<Index>& keep) {
    Matrix out(static_cast<Index>(keep.size()), n);
    for (std::size_t i = 0; i < keep.size(); ++i) out.row(static_cast<Index>(i)) = full.row(keep[i]);
    return out;
  };

  const auto normalize = [](LinearOperator<Scalar>& op) {
    const auto est = largest_eigenvalue_aat(op);
    if (est.value > Scalar(0)) op.set_scale(Scalar(1) / std::sqrt(est.value));
    op.counter().reset();
  };

  switch (type) {
    case 1: {
      Matrix full(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) full(i, j) = Scalar(rng.normal());
      auto op = LinearOperator<Scalar>::FromDense(select_rows(full, rng.sample_indices(n, m)));
      normalize(op);
      return op;
    }
    case 2: {
      Matrix g(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) = Scalar(rng.normal());
      // orthonormal rows: QR of G^T gives G^T = Q R, take A = Q^T
      Eigen::HouseholderQR<Matrix> qr(g.transpose());
      Matrix q = qr.householderQ() * Matrix::Identity(n, n);
      Matrix full = q.transpose();
      return LinearOperator<Scalar>::FromDense(select_rows(full, rng.sample_indices(n, m)));
    }
    case 3: {
      Matrix full(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) full(i, j) = Scalar(rng.sign());
      auto op = LinearOperator<Scalar>::FromDense(select_rows(full, rng.sample_indices(n, m)));
      normalize(op);
      return op;
    }
    case 4: {
      if (n <= 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("gen_matrix: Hadamard ensemble needs n = 2^k");
      const std::vector<Index> keep = rng.sample_indices(n, m);
      Matrix rows(m, n);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) rows(i, j) = Scalar(detail::hadamard_entry(keep[i], j));
      auto op = LinearOperator<Scalar>::FromDense(std::move(rows));
      normalize(op);
      return op;
    }
    case 5:
      return LinearOperator<Scalar>::PartialDct(n, rng.sample_indices(n, m));
    default:
      throw std::invalid_argument("gen_matrix: unknown matrix type");
  }
}

/// Sparse test signals on a uniformly random support of size K:
///   1: standard normal entries          4: random signs (sign of a normal)
///   2: uniform on (-1, 1)               5: power decay 1e5 * i^(-1.5), random signs
///   3: all ones                         6: exponential decay exp(-0.005 i), random signs
/// For types 5 and 6 the decaying magnitudes are assigned to the support in a
/// random order.
template <typename Scalar = double>
DenseVector<Scalar> gen_signal(int type, Index n, Index K, std::uint64_t seed) {
  if (K < 0 || K > n) throw std::invalid_argument("gen_signal: need 0 <= K <= n");
  Rng rng(seed);
  const std::vector<Index> support = rng.sample_indices(n, K);
  DenseVector<Scalar> x = DenseVector<Scalar>::Zero(n);
  switch (type) {
    case 1:
      for (Index i : support) x[i] = Scalar(rng.normal());
      return x;
    case 2:
      for (Index i : support) x[i] = Scalar(rng.uniform(-1.0, 1.0));
      return x;
    case 3:
      for (Index i : support) x[i] = Scalar(1);
      return x;
    case 4:
      for (Index i : support) x[i] = Scalar(rng.sign());
      return x;
    case 5:
    case 6: {
      std::vector<Scalar> mags(static_cast<std::size_t>(K));
      for (Index i = 1; i <= K; ++i)
        mags[static_cast<std::size_t>(i - 1)] =
            type == 5 ? Scalar(1e5 * std::pow(static_cast<double>(i), -1.5))
                      : Scalar(std::exp(-0.005 * static_cast<double>(i)));
      for (auto& v : mags) v *= Scalar(rng.sign());
      rng.shuffle(mags);
      for (Index i = 0; i < K; ++i) x[support[static_cast<std::size_t>(i)]] =
          mags[static_cast<std::size_t>(i)];
      return x;
    }
    default:
      throw std::invalid_argument("gen_signal: unknown signal type");
  }
}

/// Exact-data instance: b = A x_true, delta = 0.
template <typename Scalar = double>
ProblemInstance<Scalar> gen_instance(int matrix_type, int signal_type, Index n, Index m, Index K,
                                     std::uint64_t seed) {
  ProblemInstance<Scalar> inst;
  inst.op = gen_matrix<Scalar>(matrix_type, m, n, mix_seed(seed, 1));
  inst.x_true = gen_signal<Scalar>(signal_type, n, K, mix_seed(seed, 2));
  inst.b = apply(inst.op, *inst.x_true);
  inst.op.counter().reset();
  inst.matrix_type = matrix_type;
  inst.signal_type = signal_type;
  inst.n = n;
  inst.m = m;
  inst.K = K;
  inst.seed = seed;
  return inst;
}

/// Additive noise with a fixed level: b = A x_true + theta * xi / ||xi||,
/// xi standard normal. Records theta and sets delta = theta.
template <typename Scalar>
void add_noise(ProblemInstance<Scalar>& inst, Scalar theta, std::uint64_t seed) {
  if (!inst.x_true.has_value()) throw std::invalid_argument("add_noise: x_true required");
  if (theta == Scalar(0)) return;
  Rng rng(mix_seed(seed, 3));
  DenseVector<Scalar> xi(inst.op.rows());
  for (Index i = 0; i < xi.size(); ++i) xi[i] = Scalar(rng.normal());
  inst.b = apply(inst.op, *inst.x_true) + theta * xi / xi.norm();
  inst.op.counter().reset();
  inst.theta = theta;
  inst.delta = theta;
}

// ---------------------------------------------------------------------------
// Structured benchmark rows regenerated from their published shape: Gaussian
// ensemble (type 1), random support and signs, magnitudes taken from a short
// list of (height, count) levels assigned in random order.
// ---------------------------------------------------------------------------

struct BenchmarkLevel {
  double height;
  int count;
};

struct BenchmarkRow {
  const char* name;
  Index n, m;
  std::vector<BenchmarkLevel> levels;  // K is the sum of the counts
};

inline const std::vector<BenchmarkRow>& caltech_rows() {
  static const std::vector<BenchmarkRow> rows = {
      {"CaltechTest1", 512, 128, {{1e5, 33}, {1, 5}}},
      {"CaltechTest2", 512, 128, {{1e5, 32}, {1, 5}}},
      {"CaltechTest3", 512, 128, {{1e5, 31}, {1e-6, 1}}},
      {"CaltechTest4", 512, 102, {{1e4, 13}, {1, 12}, {1e-2, 1}}},
      {"Ameth6Xmeth20", 1024, 512, {{1, 150}}},
      {"Ameth6Xmeth21", 1024, 512, {{1, 150}}},
      {"Ameth6Xmeth22", 1024, 512, {{1, 150}}},
      {"Ameth6Xmeth23", 1024, 512, {{1, 150}}},
      {"Ameth6Xmeth24", 1024, 512, {{1, 150}}},
      {"Ameth6Xmeth6", 1024, 512, {{1, 150}}},
  };
  return rows;
}

template <typename Scalar = double>
ProblemInstance<Scalar> gen_caltech(int row, std::uint64_t seed) {
  const auto& rows = caltech_rows();
  if (row < 1 || row > static_cast<int>(rows.size()))
    throw std::invalid_argument("gen_caltech: row must be in 1..10");
  const BenchmarkRow& bench_row = rows[static_cast<std::size_t>(row - 1)];

  Index K = 0;
  std::vector<Scalar> mags;
  for (const auto& level : bench_row.levels) {
    K += level.count;
    for (int c = 0; c < level.count; ++c) mags.push_back(Scalar(level.height));
  }

  ProblemInstance<Scalar> inst;
  inst.op = gen_matrix<Scalar>(1, bench_row.m, bench_row.n, mix_seed(seed, 1));

  Rng rng(mix_seed(seed, 2));
  const std::vector<Index> support = rng.sample_indices(bench_row.n, K);
  for (auto& v : mags) v *= Scalar(rng.sign());
  rng.shuffle(mags);
  DenseVector<Scalar> x = DenseVector<Scalar>::Zero(bench_row.n);
  for (Index i = 0; i < K; ++i)
    x[support[static_cast<std::size_t>(i)]] = mags[static_cast<std::size_t>(i)];

  inst.x_true = std::move(x);
  inst.b = apply(inst.op, *inst.x_true);
  inst.op.counter().reset();
  inst.matrix_type = 1;
  inst.signal_type = 0;
  inst.n = bench_row.n;
  inst.m = bench_row.m;
  inst.K = K;
  inst.seed = seed;
  inst.name = bench_row.name;
  return inst;
}

}  // namespace epd
