#include "dwm/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace dwm {

std::string to_string(QfiMethod method) {
  switch (method) {
    case QfiMethod::PureVariance: return "PureVariance";
    case QfiMethod::Spectral: return "Spectral";
    case QfiMethod::ZeroSplit: return "ZeroSplit";
    case QfiMethod::DiagonalProduct: return "DiagonalProduct";
    case QfiMethod::FastProduct: return "FastProduct";
    case QfiMethod::FormulaRef: return "FormulaRef";
  }
  return "?";
}

namespace {

double kernel(double x, double y) {
  const double d = x - y;
  return d * d / (x + y);
}

void check_generator(const SparseOperator& g, std::size_t dimension) {
  if (!g.hermitian()) throw std::invalid_argument("QFI: generator is not Hermitian");
  if (g.dimension() != dimension) {
    throw std::invalid_argument("QFI: generator dimension " + std::to_string(g.dimension()) +
                                " does not match state dimension " + std::to_string(dimension));
  }
}

struct Eigensystem {
  Eigen::VectorXd p;
  Eigen::MatrixXcd g;  // generator in the eigenbasis of rho
};

Eigensystem diagonalize(const DenseHermitian& rho, const SparseOperator& g,
                        const SpectralOptions& options) {
  if (!rho.hermitian) throw std::invalid_argument("QFI: density matrix is not Hermitian");
  check_generator(g, static_cast<std::size_t>(rho.dimension()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.matrix);
  if (solver.info() != Eigen::Success) throw std::runtime_error("QFI: eigendecomposition failed");
  const Eigen::VectorXd& p = solver.eigenvalues();
  if (p.size() > 0 && p.minCoeff() < -options.negative_tolerance) {
    throw std::invalid_argument("QFI: density matrix is not positive semidefinite (eigenvalue " +
                                std::to_string(p.minCoeff()) + ")");
  }
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  return {p, v.adjoint() * (g.matrix() * v)};
}

void check_diagonal(const DiagonalDensity& rho, const SparseOperator& g,
                    const SpectralOptions& options) {
  check_generator(g, static_cast<std::size_t>(rho.diagonal.size()));
  if (rho.diagonal.size() > 0 && rho.diagonal.minCoeff() < -options.negative_tolerance) {
    throw std::invalid_argument("QFI: density matrix is not positive semidefinite");
  }
}

}  // namespace

QfiReport qfi_pure(const StateVector& psi, const SparseOperator& g) {
  check_state(psi, 1e-10);
  check_generator(g, psi.dimension());
  return {4.0 * variance(psi, g), QfiMethod::PureVariance, std::nullopt};
}

QfiReport qfi_spectral(const DenseHermitian& rho, const SparseOperator& g,
                       const SpectralOptions& options) {
  const auto sys = diagonalize(rho, g, options);
  const Eigen::Index d = sys.p.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double s = sys.p(i) + sys.p(j);
      if (s < options.floor) continue;
      total += 2.0 * kernel(sys.p(i), sys.p(j)) * std::norm(sys.g(i, j));
    }
  }
  return {total, QfiMethod::Spectral, std::nullopt};
}

QfiReport qfi_spectral(const DiagonalDensity& rho, const SparseOperator& g,
                       const SpectralOptions& options) {
  check_diagonal(rho, g, options);
  const auto& p = rho.diagonal;
  double total = 0.0;
  for (Eigen::Index r = 0; r < g.matrix().outerSize(); ++r) {
    for (SparseOperator::Matrix::InnerIterator it(g.matrix(), r); it; ++it) {
      const double s = p(it.row()) + p(it.col());
      if (s < options.floor) continue;
      total += 2.0 * kernel(p(it.row()), p(it.col())) * std::norm(it.value());
    }
  }
  return {total, QfiMethod::Spectral, std::nullopt};
}

QfiReport qfi_zero_split(const DenseHermitian& rho, const SparseOperator& g,
                         const SpectralOptions& options) {
  const auto sys = diagonalize(rho, g, options);
  const Eigen::Index d = sys.p.size();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (sys.p(i) >= options.floor) support.push_back(i);
  }
  QfiParts parts;
  for (Eigen::Index a : support) {
    parts.i2 += 4.0 * sys.p(a) * sys.g.col(a).squaredNorm();
    for (Eigen::Index b : support) {
      const double w = std::norm(sys.g(a, b));
      parts.i1 += 2.0 * kernel(sys.p(a), sys.p(b)) * w;
      parts.i3 -= 4.0 * sys.p(a) * w;
    }
  }
  return {parts.sum(), QfiMethod::ZeroSplit, parts};
}

QfiReport qfi_zero_split(const DiagonalDensity& rho, const SparseOperator& g,
                         const SpectralOptions& options) {
  check_diagonal(rho, g, options);
  const auto& p = rho.diagonal;
  QfiParts parts;
  for (Eigen::Index r = 0; r < g.matrix().outerSize(); ++r) {
    for (SparseOperator::Matrix::InnerIterator it(g.matrix(), r); it; ++it) {
      // entry <row|G|col>; G is Hermitian, so |G(row,col)|^2 = |G(col,row)|^2
      const double w = std::norm(it.value());
      const double pa = p(it.col()), pb = p(it.row());
      if (pa < options.floor) continue;
      parts.i2 += 4.0 * pa * w;
      if (pb < options.floor) continue;
      parts.i1 += 2.0 * kernel(pa, pb) * w;
      parts.i3 -= 4.0 * pa * w;
    }
  }
  return {parts.sum(), QfiMethod::ZeroSplit, parts};
}

QfiReport qfi_diagonal_product(const DiagonalProductState& state, const SingleParticleMatrix& h) {
  const int wells = state.wells();
  if (h.rows() != 2 * wells || h.cols() != 2 * wells) {
    throw std::invalid_argument("diagonal product: generator size does not match well count");
  }
  if (hermiticity_defect(h) > 1e-12) {
    throw std::invalid_argument("diagonal product: generator is not Hermitian");
  }
  if (h.diagonal().cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("diagonal product: generator has number-operator terms");
  }

  // single-well moments E[n_l], E[n_r]
  std::vector<double> mean_left(wells), mean_right(wells);
  for (int w = 0; w < wells; ++w) {
    const auto& p = state.per_well()[w].weights;
    const int n = state.per_well()[w].n();
    double l = 0.0;
    for (int m = 0; m <= n; ++m) l += p(m) * m;
    mean_left[w] = l;
    mean_right[w] = n - l;
  }

  QfiParts parts;
  for (int q = 0; q < 2 * wells; ++q) {
    for (int src = 0; src < 2 * wells; ++src) {
      if (q == src) continue;
      const double h2 = std::norm(h(q, src));
      if (h2 == 0.0) continue;
      const ModeId to = ModeId::from_flat(q), from = ModeId::from_flat(src);
      if (to.well != from.well) {
        // the image always leaves the support: only Tr[rho G^2] sees it
        const double np = from.side == Side::Left ? mean_left[from.well - 1]
                                                  : mean_right[from.well - 1];
        const double nq = to.side == Side::Left ? mean_left[to.well - 1]
                                                : mean_right[to.well - 1];
        parts.i2 += 4.0 * h2 * np * (nq + 1.0);
        continue;
      }
      const auto& p = state.per_well()[from.well - 1].weights;
      const int n = state.per_well()[from.well - 1].n();
      const bool left_to_right = from.side == Side::Left;
      for (int m = 0; m <= n; ++m) {
        const int target = left_to_right ? m - 1 : m + 1;
        const double amp2 = left_to_right ? double(m) * (n - m + 1) : double(n - m) * (m + 1);
        if (target < 0 || target > n || amp2 == 0.0) continue;
        const double w = h2 * amp2;
        parts.i2 += 4.0 * p(m) * w;
        if (p(m) > 0.0 && p(target) > 0.0) {
          parts.i1 += 2.0 * kernel(p(m), p(target)) * w;
          parts.i3 -= 4.0 * p(m) * w;
        }
      }
    }
  }
  return {parts.sum(), QfiMethod::DiagonalProduct, parts};
}

QfiReport qfi_diagonal_product(const DiagonalProductState& state, bool mixing) {
  const int wells = state.wells();
  const auto h = mixing ? single_particle({GeneratorTag::SyTotal, 0}, wells)
                        : jy_single(wells);
  // drop rounding dust on the diagonal left by the mixing exponential
  SingleParticleMatrix clean = h;
  for (Eigen::Index k = 0; k < clean.rows(); ++k) {
    if (std::abs(clean(k, k)) < 1e-14) clean(k, k) = 0.0;
  }
  return qfi_diagonal_product(state, clean);
}

namespace {

// One ladder operator on a single well: creation or annihilation on a side.
struct Ladder {
  bool create;
  Side side;
};

// <psi| ops[0] ops[1] ... |psi> for a single-well state over m = 0..n.
cd well_expectation(const Eigen::VectorXcd& psi, const std::vector<Ladder>& ops) {
  int balance = 0;
  for (const auto& op : ops) balance += op.create ? 1 : -1;
  if (balance != 0) return 0.0;
  const int n = static_cast<int>(psi.size()) - 1;
  cd total = 0.0;
  for (int m = 0; m <= n; ++m) {
    if (psi(m) == cd(0.0, 0.0)) continue;
    int nl = m, nr = n - m;
    double factor = 1.0;
    for (auto it = ops.rbegin(); it != ops.rend() && factor != 0.0; ++it) {
      int& occ = it->side == Side::Left ? nl : nr;
      if (it->create) {
        factor *= std::sqrt(static_cast<double>(occ + 1));
        ++occ;
      } else {
        factor *= std::sqrt(static_cast<double>(occ));
        --occ;
      }
    }
    if (factor == 0.0) continue;
    total += std::conj(psi(nl)) * factor * psi(m);
  }
  return total;
}

struct Term {
  cd c;
  ModeId to;
  ModeId from;
};

class ProductExpectation {
 public:
  explicit ProductExpectation(std::span<const Eigen::VectorXcd> wells)
      : wells_(wells), memo_(wells.size()) {}

  // <prod_k a_{to_k}^dag a_{from_k}> in the given order
  cd operator()(std::span<const Term* const> terms) {
    std::map<int, std::vector<Ladder>> per_well;
    for (const Term* t : terms) {
      per_well[t->to.well].push_back({true, t->to.side});
      per_well[t->from.well].push_back({false, t->from.side});
    }
    cd result = 1.0;
    for (const auto& [well, ops] : per_well) {
      result *= lookup(well - 1, ops);
      if (result == cd(0.0, 0.0)) break;
    }
    return result;
  }

 private:
  cd lookup(int w, const std::vector<Ladder>& ops) {
    int key = static_cast<int>(ops.size());
    for (const auto& op : ops) key = key * 4 + (op.create ? 2 : 0) + static_cast<int>(op.side);
    auto& memo = memo_[static_cast<std::size_t>(w)];
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const cd v = well_expectation(wells_[static_cast<std::size_t>(w)], ops);
    memo.emplace(key, v);
    return v;
  }

  std::span<const Eigen::VectorXcd> wells_;
  std::vector<std::map<int, cd>> memo_;
};

}  // namespace

QfiReport qfi_product_pure_fast(std::span<const Eigen::VectorXcd> wells,
                                const SingleParticleMatrix& h) {
  const int count = static_cast<int>(wells.size());
  if (count < 1) throw std::invalid_argument("fast product: no wells");
  if (h.rows() != 2 * count || h.cols() != 2 * count) {
    throw std::invalid_argument("fast product: generator size does not match well count");
  }
  if (hermiticity_defect(h) > 1e-12) {
    throw std::invalid_argument("fast product: generator is not Hermitian");
  }
  for (const auto& w : wells) {
    if (w.size() == 0 || std::abs(w.norm() - 1.0) > 1e-10) {
      throw std::invalid_argument("fast product: single-well state is empty or not normalized");
    }
  }

  std::vector<Term> terms;
  for (int p = 0; p < 2 * count; ++p) {
    for (int q = 0; q < 2 * count; ++q) {
      if (h(q, p) != cd(0.0, 0.0)) {
        terms.push_back({h(q, p), ModeId::from_flat(q), ModeId::from_flat(p)});
      }
    }
  }

  ProductExpectation expect(wells);
  std::vector<cd> single(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Term* t[] = {&terms[k]};
    single[k] = expect(t);
  }
  // 4 Var(G) = 4 sum_{t1,t2} c1 c2 (<A1 A2> - <A1><A2>); disjoint supports drop out
  cd total = 0.0;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const auto& ta = terms[a];
    for (std::size_t b = 0; b < terms.size(); ++b) {
      const auto& tb = terms[b];
      const bool shared = ta.to.well == tb.to.well || ta.to.well == tb.from.well ||
                          ta.from.well == tb.to.well || ta.from.well == tb.from.well;
      if (!shared) continue;
      const Term* pair[] = {&ta, &tb};
      total += ta.c * tb.c * (expect(pair) - single[a] * single[b]);
    }
  }
  return {4.0 * total.real(), QfiMethod::FastProduct, std::nullopt};
}

QfiReport qfi_product_pure_fast(std::span<const Eigen::VectorXcd> wells, int M, int n,
                                bool mixing) {
  if (static_cast<int>(wells.size()) != M) {
    throw std::invalid_argument("fast product: expected " + std::to_string(M) + " wells");
  }
  for (const auto& w : wells) {
    if (w.size() != n + 1) {
      throw std::invalid_argument("fast product: every well must hold n = " + std::to_string(n) +
                                  " bosons");
    }
  }
  const auto h = mixing ? single_particle({GeneratorTag::SyTotal, 0}, M) : jy_single(M);
  return qfi_product_pure_fast(wells, h);
}

namespace {

class JyPropagator {
 public:
  JyPropagator(const SparseOperator& j, const UnitaryOptions& options)
      : j_(j), options_(options) {
    if (j.dimension() <= options.dense_threshold) dense_.emplace(j);
  }

  Eigen::VectorXcd apply(double angle, const Eigen::VectorXcd& v) const {
    if (angle == 0.0) return v;
    if (dense_) return dense_->apply(angle, v);
    return chebyshev_apply(j_, angle, v, options_.tolerance);
  }

 private:
  const SparseOperator& j_;
  UnitaryOptions options_;
  std::optional<SpectralPropagator> dense_;
};

}  // namespace

std::vector<MeasurementRecord> measurement_distribution(const StateVector& psi, double theta) {
  check_state(psi, 1e-10);
  const auto j = jy_total(psi.basis);
  const Eigen::VectorXcd out = JyPropagator(j, {}).apply(theta, psi.amplitudes);
  std::vector<MeasurementRecord> records;
  records.reserve(psi.dimension());
  for (std::size_t k = 0; k < psi.dimension(); ++k) {
    records.push_back({psi.basis->unrank(k), std::norm(out(static_cast<Eigen::Index>(k)))});
  }
  return records;
}

CfiReport cfi_number(const StateVector& psi_in, double theta0, CfiMode mode,
                     const CfiOptions& options) {
  check_state(psi_in, 1e-10);
  const auto j = jy_total(psi_in.basis);
  CfiReport report;
  report.mode = mode;

  if (mode == CfiMode::AnalyticAtZero) {
    if (theta0 != 0.0) {
      throw std::invalid_argument("AnalyticAtZero is only defined at theta0 = 0");
    }
    const double imag = max_imag(psi_in);
    if (imag >= 1e-12) {
      throw std::invalid_argument("AnalyticAtZero needs real coefficients (max |Im| = " +
                                  std::to_string(imag) + ")");
    }
    const Eigen::VectorXcd x = j.apply(psi_in.amplitudes);
    report.value = 4.0 * x.squaredNorm() - 4.0 * x.real().squaredNorm();
    return report;
  }

  const JyPropagator prop(j, options.unitary);
  const double h = options.step;
  const Eigen::VectorXcd centre = prop.apply(theta0, psi_in.amplitudes);
  const Eigen::VectorXcd plus = prop.apply(theta0 + h, psi_in.amplitudes);
  const Eigen::VectorXcd minus = prop.apply(theta0 - h, psi_in.amplitudes);
  const Eigen::VectorXcd jcentre = j.apply(centre);

  int flagged = 0;
  double total = 0.0;
  for (Eigen::Index k = 0; k < centre.size(); ++k) {
    const double p = std::norm(centre(k));
    const double dp = (std::norm(plus(k)) - std::norm(minus(k))) / (2.0 * h);
    if (p >= options.zero_probability) {
      total += dp * dp / p;
      continue;
    }
    // amplitude vanishes at theta0: p ~ |<n|J psi>|^2 dtheta^2
    total += 4.0 * std::norm(jcentre(k));
    if (std::abs(dp) > options.derivative_threshold) ++flagged;
  }
  if (flagged > 0) {
    report.warnings.push_back(std::to_string(flagged) +
                              " outcome(s) with p < " + std::to_string(options.zero_probability) +
                              " but |dp/dtheta| > " + std::to_string(options.derivative_threshold) +
                              "; CFI may be ill-conditioned");
  }
  report.value = total;
  return report;
}

}  // namespace dwm
