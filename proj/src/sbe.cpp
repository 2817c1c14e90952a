#include "hhgnd/sbe.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hhgnd/units.hpp"

namespace hhgnd {

namespace {

constexpr cd kI{0.0, 1.0};
constexpr double kAbortHermiticity = 1e-6;
constexpr long kCheckInterval = 1000;
constexpr std::size_t kChunkSize = 32;

// Pairwise sum over a fixed index range; the tree shape depends only on size.
Vec2 tree_sum(const std::vector<Vec2>& values, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return values[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_sum(values, lo, mid) + tree_sum(values, mid, hi);
}

// Fixed-size propagation kernel. Works in reduced k coordinates so that the
// Bloch phases are products of exp(2 pi i u) powers. Energies in Hartree.
template <int N>
class Kernel {
 public:
  using Mat = Eigen::Matrix<cd, N, N>;

  Kernel(const LatticeModel& model, const PropagationParams& params)
      : eigen_dephasing_(params.dephasing_basis == DephasingBasis::kEigen), gamma_(1.0 / params.tau_au()) {
    for (int i = 0; i < N; ++i) {
      onsite_[i] = ev_to_hartree(model.onsite[i]);
      tau_[i] = model.tau[i];
    }
    for (const auto& h : model.hoppings) {
      const Vec2 r = model.cell_vector(h.r_cell);
      hops_.push_back({h.r_cell[0], h.r_cell[1], h.n, h.m, h.amplitude / constants::kEnergyUnitEv, r.x(), r.y()});
      reach_ = std::max({reach_, std::abs(h.r_cell[0]), std::abs(h.r_cell[1])});
    }
    if (reach_ > kMaxReach) throw PropagationError("hopping range too long for the propagation kernel");
    for (const auto& block : model.blocks) {
      if (block.size() != 2 || block[1] != block[0] + 1) {
        throw PropagationError("propagation kernel expects contiguous two-orbital blocks");
      }
    }
  }

  Mat hamiltonian(const Vec2& reduced) const {
    Phases ph = phases(reduced);
    Mat h = Mat::Zero();
    for (int i = 0; i < N; ++i) h(i, i) = onsite_[i];
    for (const auto& hop : hops_) h(hop.n, hop.m) += hop.amp * ph.p1[hop.r1 + kMaxReach] * ph.p2[hop.r2 + kMaxReach];
    return h;
  }

  // Generator and dephasing projector data at one (k, t) point.
  struct Stage {
    Mat h;  // H0 + E.xi
    Mat s;  // block-diagonal sign operator of H0, eigen dephasing only
    std::array<bool, N / 2> degenerate{};
  };

  Stage prepare(const Vec2& reduced, const Vec2& e_field) const {
    Stage st;
    st.h = hamiltonian(reduced);
    if (eigen_dephasing_) {
      st.s.setZero();
      for (int b = 0; b < N; b += 2) {
        const double hz = 0.5 * (st.h(b, b).real() - st.h(b + 1, b + 1).real());
        const cd hxy = st.h(b, b + 1);
        const double norm = std::sqrt(hz * hz + std::norm(hxy));
        st.degenerate[b / 2] = norm == 0.0;
        if (norm == 0.0) continue;
        st.s(b, b) = hz / norm;
        st.s(b, b + 1) = hxy / norm;
        st.s(b + 1, b) = std::conj(hxy) / norm;
        st.s(b + 1, b + 1) = -hz / norm;
      }
    }
    for (int i = 0; i < N; ++i) st.h(i, i) += e_field.dot(tau_[i]);
    return st;
  }

  Mat rhs(const Mat& rho, const Stage& st) const {
    Mat out = -kI * (st.h * rho - rho * st.h);
    out.noalias() -= gamma_ * offdiagonal(rho, st);
    return out;
  }

  // Off-diagonal part of rho. Within a block the eigenprojector sum is
  // (rho + S rho S)/2; entries between blocks decay fully.
  Mat offdiagonal(const Mat& rho, const Stage& st) const {
    Mat d = rho;
    if (!eigen_dephasing_) {
      for (int i = 0; i < N; ++i) d(i, i) = 0.0;
      return d;
    }
    for (int b = 0; b < N; b += 2) {
      if (st.degenerate[b / 2]) {
        d.template block<2, 2>(b, b).setZero();
        continue;
      }
      const Eigen::Matrix2cd r = rho.template block<2, 2>(b, b);
      const Eigen::Matrix2cd s = st.s.template block<2, 2>(b, b);
      d.template block<2, 2>(b, b) = 0.5 * (r - s * r * s);
    }
    return d;
  }

  Vec2 current(const Mat& rho, const Vec2& reduced, double& imag_out) const {
    Phases ph = phases(reduced);
    Mat h = Mat::Zero();
    Mat gx = Mat::Zero();
    Mat gy = Mat::Zero();
    for (int i = 0; i < N; ++i) h(i, i) = onsite_[i];
    for (const auto& hop : hops_) {
      const cd v = hop.amp * ph.p1[hop.r1 + kMaxReach] * ph.p2[hop.r2 + kMaxReach];
      h(hop.n, hop.m) += v;
      gx(hop.n, hop.m) += kI * hop.rx * v;
      gy(hop.n, hop.m) += kI * hop.ry * v;
    }
    cd jx = 0.0;
    cd jy = 0.0;
    for (int n = 0; n < N; ++n) {
      for (int m = 0; m < N; ++m) {
        const Vec2 dtau = tau_[n] - tau_[m];
        jx += rho(m, n) * (gx(n, m) - kI * dtau.x() * h(n, m));
        jy += rho(m, n) * (gy(n, m) - kI * dtau.y() * h(n, m));
      }
    }
    imag_out = std::max(std::abs(jx.imag()), std::abs(jy.imag()));
    return Vec2(jx.real(), jy.real());
  }

 private:
  static constexpr int kMaxReach = 2;
  struct Hop {
    int r1, r2, n, m;
    cd amp;
    double rx, ry;
  };
  struct Phases {
    std::array<cd, 2 * kMaxReach + 1> p1;
    std::array<cd, 2 * kMaxReach + 1> p2;
  };

  Phases phases(const Vec2& reduced) const {
    Phases ph;
    const cd z1 = std::polar(1.0, 2.0 * constants::kPi * reduced.x());
    const cd z2 = std::polar(1.0, 2.0 * constants::kPi * reduced.y());
    ph.p1[kMaxReach] = ph.p2[kMaxReach] = 1.0;
    for (int r = 1; r <= reach_; ++r) {
      ph.p1[kMaxReach + r] = ph.p1[kMaxReach + r - 1] * z1;
      ph.p2[kMaxReach + r] = ph.p2[kMaxReach + r - 1] * z2;
      ph.p1[kMaxReach - r] = std::conj(ph.p1[kMaxReach + r]);
      ph.p2[kMaxReach - r] = std::conj(ph.p2[kMaxReach + r]);
    }
    return ph;
  }

  std::array<double, N> onsite_{};
  std::array<Vec2, N> tau_{};
  std::vector<Hop> hops_;
  int reach_ = 0;
  bool eigen_dephasing_;
  double gamma_;
};

template <int N>
PropagationResult run_kernel(const LatticeModel& model, const MPGrid& grid, const PulseParams& pulse,
                             const HsFrame& frame, const PropagationParams& params) {
  using Mat = typename Kernel<N>::Mat;
  const Kernel<N> kernel(model, params);
  const double dt = params.dt_au();
  const long steps = step_count(pulse, params);
  const long stride = params.output_stride;
  const long samples = steps / stride + 1;
  const std::size_t nk = grid.size();
  const double n_occ = model.n_occupied();

  // Field on the half-step time grid: reduced momentum shift and Cartesian E.
  std::vector<Vec2> shift(2 * steps + 1);
  std::vector<Vec2> efield(2 * steps + 1);
  for (long s = 0; s <= 2 * steps; ++s) {
    const FieldSample f = effective_field(0.5 * dt * s, pulse, frame);
    shift[s] = Vec2(f.a_2d.dot(model.a1), f.a_2d.dot(model.a2)) / (2.0 * constants::kPi);
    efield[s] = f.e_2d;
  }

  const DensityGrid init = initial_density(model, grid);
  std::vector<Mat> rho(nk);
  for (std::size_t p = 0; p < nk; ++p) rho[p] = init.rho[p];

  const std::size_t n_chunks = (nk + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<Vec2>> partial(n_chunks);
  std::vector<double> chunk_herm(n_chunks, 0.0);
  std::vector<double> chunk_trace(n_chunks, 0.0);
  std::vector<double> chunk_imag(n_chunks, 0.0);

  PropagationResult result;
  result.trace.omega0 = pulse.omega();
  result.trace.t.reserve(samples);
  result.trace.j.reserve(samples);

  const int workers = params.workers > 0 ? params.workers : omp_get_max_threads();
  result.diagnostics.steps = steps;
  result.diagnostics.workers = workers;

  auto flush = [&](long first_sample, long count) {
    std::vector<Vec2> column(n_chunks);
    for (long s = 0; s < count; ++s) {
      for (std::size_t c = 0; c < n_chunks; ++c) column[c] = partial[c][s];
      const Vec2 j = tree_sum(column, 0, n_chunks) * grid.weight;
      result.trace.t.push_back(static_cast<double>((first_sample + s) * stride) * dt);
      result.trace.j.push_back(frame.project(j));
    }
  };

  // Window [begin, end) of steps; samples at step indices that are multiples
  // of the stride and lie in (begin, end], plus step 0 for the first window.
  for (long begin = 0; begin < steps || begin == 0; begin += kCheckInterval) {
    const long end = std::min(steps, begin + kCheckInterval);
    const long first_sample = begin == 0 ? 0 : begin / stride + 1;
    const long last_sample = end / stride;
    const long count = last_sample - first_sample + 1;

#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::size_t c = 0; c < n_chunks; ++c) {
      auto& sums = partial[c];
      sums.assign(static_cast<std::size_t>(std::max(count, 0L)), Vec2::Zero());
      double herm = chunk_herm[c];
      double drift = chunk_trace[c];
      double imag = chunk_imag[c];
      const std::size_t lo = c * kChunkSize;
      const std::size_t hi = std::min(nk, lo + kChunkSize);
      for (std::size_t p = lo; p < hi; ++p) {
        const Vec2 k0 = grid.points[p];
        Mat r = rho[p];
        double im = 0.0;
        if (begin == 0) {
          sums[0] += kernel.current(r, k0 + shift[0], im);
          imag = std::max(imag, im);
        }
        typename Kernel<N>::Stage st_a = kernel.prepare(k0 + shift[2 * begin], efield[2 * begin]);
        for (long s = begin; s < end; ++s) {
          const Vec2 k_c = k0 + shift[2 * s + 2];
          const auto st_b = kernel.prepare(k0 + shift[2 * s + 1], efield[2 * s + 1]);
          auto st_c = kernel.prepare(k_c, efield[2 * s + 2]);
          const Mat d1 = kernel.rhs(r, st_a);
          const Mat d2 = kernel.rhs(r + (0.5 * dt) * d1, st_b);
          const Mat d3 = kernel.rhs(r + (0.5 * dt) * d2, st_b);
          const Mat d4 = kernel.rhs(r + dt * d3, st_c);
          r += (dt / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
          if ((s + 1) % stride == 0) {
            sums[(s + 1) / stride - first_sample] += kernel.current(r, k_c, im);
            imag = std::max(imag, im);
          }
          st_a = std::move(st_c);
        }
        herm = std::max(herm, (r - r.adjoint()).cwiseAbs().maxCoeff());
        drift = std::max(drift, std::abs(r.trace() - n_occ));
        rho[p] = r;
      }
      chunk_herm[c] = herm;
      chunk_trace[c] = drift;
      chunk_imag[c] = imag;
    }

    const double herm = *std::max_element(chunk_herm.begin(), chunk_herm.end());
    if (!(herm <= kAbortHermiticity)) {
      throw NumericalAbort("density lost Hermiticity (deviation " + std::to_string(herm) + ") by step " +
                           std::to_string(end) + "; reduce the time step");
    }
    if (count > 0) flush(first_sample, count);
    if (steps == 0) break;
  }

  result.diagnostics.max_hermiticity_deviation = *std::max_element(chunk_herm.begin(), chunk_herm.end());
  result.diagnostics.max_trace_drift = *std::max_element(chunk_trace.begin(), chunk_trace.end());
  result.diagnostics.max_current_imag = *std::max_element(chunk_imag.begin(), chunk_imag.end());
  return result;
}

}  // namespace

DephasingBasis parse_dephasing_basis(const std::string& name) {
  if (name == "eigen") return DephasingBasis::kEigen;
  if (name == "wannier") return DephasingBasis::kWannier;
  throw PropagationError("unknown dephasing basis '" + name + "'");
}

std::string to_string(DephasingBasis basis) { return basis == DephasingBasis::kEigen ? "eigen" : "wannier"; }

void PropagationParams::validate() const {
  if (!(dt_as > 0.0)) throw PropagationError("time step must be positive");
  if (!(tau_fs > 0.0)) throw PropagationError("dephasing time must be positive");
  if (output_stride < 1) throw PropagationError("output stride must be >= 1");
  if (workers < 0) throw PropagationError("worker count must be >= 0");
}

double PropagationParams::dt_au() const { return as_to_au(dt_as); }
double PropagationParams::tau_au() const { return fs_to_au(tau_fs); }

long step_count(const PulseParams& pulse, const PropagationParams& params) {
  return static_cast<long>(std::ceil(pulse.duration() / params.dt_au()));
}

DensityGrid initial_density(const LatticeModel& model, const MPGrid& grid) {
  const int n = model.n_orbitals;
  const int occ = model.n_occupied();
  DensityGrid out;
  out.n_orbitals = n;
  out.rho.reserve(grid.size());
  for (const Vec2& u : grid.points) {
    const EigenSystem es = eigensystem(model, to_cartesian(model, u));
    const double split = es.energies(occ) - es.energies(occ - 1);
    if (split <= 1e-10 * std::max(1.0, std::abs(es.energies(occ)))) {
      throw PropagationError("occupied and empty bands are degenerate at reduced k (" + std::to_string(u.x()) +
                             ", " + std::to_string(u.y()) + ")");
    }
    const CMatrix v = es.unitary.leftCols(occ);
    out.rho.push_back(v * v.adjoint());
  }
  return out;
}

Vec2 shifted_k(const Vec2& k0, double t, const PulseParams& pulse, const HsFrame& frame) {
  return k0 + effective_field(t, pulse, frame).a_2d;
}

CMatrix dephasing_offdiagonal(const CMatrix& rho_k, const LatticeModel& model, const Vec2& k,
                              DephasingBasis basis) {
  if (basis == DephasingBasis::kWannier) {
    CMatrix d = rho_k;
    d.diagonal().setZero();
    return d;
  }
  const EigenSystem es = eigensystem(model, k);
  CMatrix diagonal_part = CMatrix::Zero(rho_k.rows(), rho_k.cols());
  for (int n = 0; n < es.unitary.cols(); ++n) {
    const CMatrix proj = es.unitary.col(n) * es.unitary.col(n).adjoint();
    diagonal_part += proj * rho_k * proj;
  }
  return rho_k - diagonal_part;
}

CMatrix rhs(const CMatrix& rho_k, const Vec2& k0, double t, const LatticeModel& model, const PulseParams& pulse,
            const HsFrame& frame, const PropagationParams& params) {
  const FieldSample f = effective_field(t, pulse, frame);
  const Vec2 k = k0 + f.a_2d;
  const CMatrix h0 = hamiltonian(model, k) / constants::kEnergyUnitEv;
  const auto xi = berry_connection(model);
  const CMatrix h = h0 + (f.e_2d.x() * xi[0] + f.e_2d.y() * xi[1]).cast<cd>();
  return -kI * (h * rho_k - rho_k * h) -
         dephasing_offdiagonal(rho_k, model, k, params.dephasing_basis) / params.tau_au();
}

Vec2 current_density(const LatticeModel& model, const CMatrix& rho_k, const Vec2& k) {
  const CMatrix h = hamiltonian(model, k) / constants::kEnergyUnitEv;
  const auto grad = grad_hamiltonian(model, k);
  const auto xi = berry_connection(model);
  Vec2 j;
  for (int a = 0; a < 2; ++a) {
    const CMatrix xa = xi[a].cast<cd>();
    const CMatrix op = grad[a] / constants::kEnergyUnitEv - kI * (xa * h - h * xa);
    j[a] = (rho_k * op).trace().real();
  }
  return j;
}

PropagationResult propagate(const LatticeModel& model, const MPGrid& grid, const PulseParams& pulse,
                            const HsFrame& frame, const PropagationParams& params) {
  params.validate();
  pulse.validate();
  switch (model.n_orbitals) {
    case 2: return run_kernel<2>(model, grid, pulse, frame, params);
    case 4: return run_kernel<4>(model, grid, pulse, frame, params);
    default: throw PropagationError("unsupported orbital count " + std::to_string(model.n_orbitals));
  }
}

}  // namespace hhgnd
