#include "hhgnd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hhgnd/units.hpp"

namespace hhgnd {

namespace {

constexpr cd kI{0.0, 1.0};

// Cell offsets of the three nearest-neighbour B sites seen from A at the origin.
constexpr std::array<std::array<int, 2>, 3> kNearestCells{{{0, 0}, {-1, 0}, {0, -1}}};
// Chirality-ordered next-nearest-neighbour offsets a1, a2 - a1, -a2.
constexpr std::array<std::array<int, 2>, 3> kNextNearestCells{{{1, 0}, {-1, 1}, {0, -1}}};

void add_hermitian_pair(std::vector<HoppingTerm>& out, std::array<int, 2> r, int n, int m, cd t) {
  out.push_back({r, n, m, t});
  out.push_back({{-r[0], -r[1]}, m, n, std::conj(t)});
}

// Appends one spinless honeycomb sector whose A/B orbitals are `ia`/`ib`.
// `soc` is the signed Kane-Mele amplitude s * chirality * t2 for this sector.
void add_honeycomb_sector(LatticeModel& model, int ia, int ib, double soc) {
  const ModelSpec& spec = model.spec;
  for (const auto& r : kNearestCells) add_hermitian_pair(model.hoppings, r, ia, ib, spec.t1);
  if (soc == 0.0) return;
  for (const auto& v : kNextNearestCells) {
    model.hoppings.push_back({v, ia, ia, -kI * soc});
    model.hoppings.push_back({{-v[0], -v[1]}, ia, ia, kI * soc});
    model.hoppings.push_back({v, ib, ib, kI * soc});
    model.hoppings.push_back({{-v[0], -v[1]}, ib, ib, -kI * soc});
  }
}

void validate(const ModelSpec& spec) {
  if (!(spec.t1 > 0.0)) throw ModelError("t1 must be positive");
  if (!(spec.a > 0.0)) throw ModelError("lattice constant a must be positive");
  if (!(spec.t2 >= 0.0)) throw ModelError("t2 must be non-negative");
  if (spec.chirality != 1 && spec.chirality != -1) throw ModelError("chirality must be +1 or -1");
  switch (spec.kind) {
    case ModelKind::kGraphene:
      if (spec.delta_a != 0.0) throw ModelError("graphene requires delta_a = 0");
      if (spec.t2 != 0.0) throw ModelError("graphene requires t2 = 0");
      break;
    case ModelKind::kHbn:
      if (!(spec.delta_a > 0.0)) throw ModelError("hbn requires delta_a > 0");
      if (spec.t2 != 0.0) throw ModelError("hbn requires t2 = 0");
      break;
    case ModelKind::kKaneMele:
      break;
  }
}

Eigen::Index dominant_component(const Eigen::VectorXcd& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - 1e-12) return i;
  }
  return 0;
}

}  // namespace

ModelKind parse_model_kind(const std::string& name) {
  if (name == "graphene") return ModelKind::kGraphene;
  if (name == "hbn") return ModelKind::kHbn;
  if (name == "kane_mele") return ModelKind::kKaneMele;
  throw ModelError("unknown model kind '" + name + "'");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kGraphene: return "graphene";
    case ModelKind::kHbn: return "hbn";
    case ModelKind::kKaneMele: return "kane_mele";
  }
  return "unknown";
}

double ModelSpec::km_ratio() const {
  if (t2 == 0.0) return std::numeric_limits<double>::infinity();
  return delta_a / (3.0 * std::sqrt(3.0) * t2);
}

LatticeModel build_model(const ModelSpec& spec) {
  validate(spec);
  LatticeModel model;
  model.spec = spec;
  model.a1 = spec.a * Vec2(1.0, 0.0);
  model.a2 = spec.a * Vec2(0.5, std::sqrt(3.0) / 2.0);
  const Vec2 tau_a = Vec2::Zero();
  const Vec2 tau_b = (model.a1 + model.a2) / 3.0;

  if (spec.kind == ModelKind::kKaneMele) {
    model.n_orbitals = 4;
    model.tau = {tau_a, tau_b, tau_a, tau_b};
    model.onsite = {spec.delta_a, -spec.delta_a, spec.delta_a, -spec.delta_a};
    model.blocks = {{0, 1}, {2, 3}};
    const double soc = spec.chirality * spec.t2;
    add_honeycomb_sector(model, 0, 1, +soc);
    add_honeycomb_sector(model, 2, 3, -soc);
    if (spec.t2 == 0.0) {
      model.warnings.push_back("kane_mele with t2 = 0 degenerates to spin-doubled hBN");
    }
  } else {
    model.n_orbitals = 2;
    model.tau = {tau_a, tau_b};
    model.onsite = {spec.delta_a, -spec.delta_a};
    model.blocks = {{0, 1}};
    add_honeycomb_sector(model, 0, 1, 0.0);
  }
  return model;
}

Vec2 to_reduced(const LatticeModel& model, const Vec2& k) {
  return Vec2(k.dot(model.a1), k.dot(model.a2)) / (2.0 * constants::kPi);
}

Vec2 to_cartesian(const LatticeModel& model, const Vec2& reduced) {
  // Columns of the inverse transpose of [a1 a2] are b1/2pi, b2/2pi.
  Eigen::Matrix2d lattice;
  lattice.col(0) = model.a1;
  lattice.col(1) = model.a2;
  const Eigen::Matrix2d recip = 2.0 * constants::kPi * lattice.inverse().transpose();
  return recip * reduced;
}

CMatrix hamiltonian(const LatticeModel& model, const Vec2& k) {
  const int n = model.n_orbitals;
  CMatrix h = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = model.onsite[i];
  for (const auto& term : model.hoppings) {
    const double phase = k.dot(model.cell_vector(term.r_cell));
    h(term.n, term.m) += term.amplitude * std::polar(1.0, phase);
  }
  return h;
}

std::array<CMatrix, 2> grad_hamiltonian(const LatticeModel& model, const Vec2& k) {
  const int n = model.n_orbitals;
  std::array<CMatrix, 2> grad{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (const auto& term : model.hoppings) {
    const Vec2 r = model.cell_vector(term.r_cell);
    const cd value = kI * term.amplitude * std::polar(1.0, k.dot(r));
    grad[0](term.n, term.m) += r.x() * value;
    grad[1](term.n, term.m) += r.y() * value;
  }
  return grad;
}

std::array<Eigen::MatrixXd, 2> berry_connection(const LatticeModel& model) {
  const int n = model.n_orbitals;
  std::array<Eigen::MatrixXd, 2> xi{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (int i = 0; i < n; ++i) {
    xi[0](i, i) = model.tau[i].x();
    xi[1](i, i) = model.tau[i].y();
  }
  return xi;
}

EigenSystem eigensystem(const LatticeModel& model, const Vec2& k) {
  const int n = model.n_orbitals;
  const CMatrix h = hamiltonian(model, k);

  struct Band {
    double energy;
    Eigen::Index lead;
    Eigen::VectorXcd vec;
  };
  std::vector<Band> bands;
  bands.reserve(n);
  for (const auto& block : model.blocks) {
    const int m = static_cast<int>(block.size());
    CMatrix sub(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) sub(i, j) = h(block[i], block[j]);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub);
    for (int c = 0; c < m; ++c) {
      Eigen::VectorXcd vec = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < m; ++i) vec(block[i]) = solver.eigenvectors()(i, c);
      const Eigen::Index lead = dominant_component(vec);
      vec *= std::conj(vec(lead)) / std::abs(vec(lead));
      vec(lead) = std::abs(vec(lead));
      bands.push_back({solver.eigenvalues()(c), lead, std::move(vec)});
    }
  }

  double scale = 1.0;
  for (const auto& b : bands) scale = std::max(scale, std::abs(b.energy));
  const double tie = 1e-12 * scale;
  std::sort(bands.begin(), bands.end(), [](const Band& x, const Band& y) { return x.energy < y.energy; });
  // Degenerate neighbours are ordered by their dominant orbital.
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < bands.size(); ++i) {
      if (std::abs(bands[i].energy - bands[i + 1].energy) <= tie && bands[i + 1].lead < bands[i].lead) {
        std::swap(bands[i], bands[i + 1]);
        swapped = true;
      }
    }
  }

  EigenSystem result;
  result.energies.resize(n);
  result.unitary.resize(n, n);
  for (int c = 0; c < n; ++c) {
    result.energies(c) = bands[c].energy;
    result.unitary.col(c) = bands[c].vec;
  }
  return result;
}

std::vector<BandSample> band_path(const LatticeModel& model, const std::vector<Vec2>& waypoints,
                                  int samples) {
  if (waypoints.size() < 2) throw ModelError("band path needs at least two waypoints");
  if (samples < 1) throw ModelError("band path needs at least one sample per segment");
  std::vector<Vec2> cart;
  cart.reserve(waypoints.size());
  for (const auto& w : waypoints) cart.push_back(to_cartesian(model, w));
  for (std::size_t s = 0; s + 1 < cart.size(); ++s) {
    if ((cart[s + 1] - cart[s]).norm() == 0.0) throw ModelError("band path has a zero-length segment");
  }

  std::vector<BandSample> out;
  double arc = 0.0;
  auto emit = [&](const Vec2& k) {
    const EigenSystem es = eigensystem(model, k);
    out.push_back({arc, std::vector<double>(es.energies.data(), es.energies.data() + es.energies.size())});
  };
  for (std::size_t s = 0; s + 1 < cart.size(); ++s) {
    const Vec2 step = (cart[s + 1] - cart[s]) / samples;
    for (int j = 0; j < samples; ++j) {
      emit(cart[s] + j * step);
      arc += step.norm();
    }
  }
  emit(cart.back());
  return out;
}

double min_direct_gap(const std::vector<BandSample>& path, int n_occupied) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& sample : path) {
    gap = std::min(gap, sample.energies[n_occupied] - sample.energies[n_occupied - 1]);
  }
  return gap;
}

}  // namespace hhgnd
