#include "igasens/spaces.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>
#include <set>

namespace igasens {

namespace {

// Union-find over glued dof candidates.
struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0L);
  }
  long find(long x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(long a, long b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;  // keep the smaller id as representative
  }
};

bool knots_equal(const SplineSpace1D& a, const SplineSpace1D& b, bool reversed) {
  if (a.degree() != b.degree() || a.num_basis() != b.num_basis()) return false;
  const auto& va = a.knots().values();
  const auto& vb = b.knots().values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double expected = reversed ? 1.0 - vb[vb.size() - 1 - i] : vb[i];
    if (std::abs(va[i] - expected) > 1e-12) return false;
  }
  return true;
}

}  // namespace

DiscreteSpace DiscreteSpace::build(const MorphGeometry& geom, ProblemKind kind,
                                   const SpaceOptions& options) {
  const int d = geom.dimension();
  std::vector<int> degrees = options.degrees;
  if (degrees.size() == 1) degrees.assign(static_cast<std::size_t>(d), degrees[0]);
  if (static_cast<int>(degrees.size()) != d)
    throw ValidationError("space: one solution degree per direction required");
  for (int p : degrees)
    if (p < 1) throw ValidationError("space: solution degrees must be >= 1");
  if (options.refine < 1) throw ValidationError("space: refine must be >= 1");

  if (kind == ProblemKind::HCurl) {
    if (d < 2) throw ValidationError("HCurl spaces need dimension 2 or 3");
    if (geom.num_patches() > 1)
      throw UnsupportedError("HCurl discretizations are single-patch only");
  }

  DiscreteSpace space;
  space.kind_ = kind;
  space.dim_ = d;
  space.options_ = options;
  space.options_.degrees = degrees;

  const int n_comp = (kind == ProblemKind::H1) ? 1 : d;

  // Per-patch base 1D spaces on the refined geometry breakpoints, then the
  // component tensor spaces.
  for (int p = 0; p < geom.num_patches(); ++p) {
    std::vector<SplineSpace1D> base;
    for (int axis = 0; axis < d; ++axis)
      base.push_back(solution_space(geom.patch(p).space.factor(axis),
                                    degrees[static_cast<std::size_t>(axis)], options.refine));
    std::vector<TensorSplineSpace> comps;
    for (int c = 0; c < n_comp; ++c) {
      std::vector<SplineSpace1D> factors;
      for (int axis = 0; axis < d; ++axis) {
        const bool reduce = (kind == ProblemKind::HCurl) && (axis == c);
        factors.push_back(reduce ? derivative_space(base[static_cast<std::size_t>(axis)])
                                 : base[static_cast<std::size_t>(axis)]);
      }
      comps.emplace_back(std::move(factors));
    }
    space.base_.push_back(std::move(base));
    space.components_.push_back(std::move(comps));
  }

  // Provisional global numbering: patches, then components, flat index fastest.
  std::vector<std::vector<long>> offsets(static_cast<std::size_t>(geom.num_patches()));
  long total = 0;
  for (int p = 0; p < geom.num_patches(); ++p) {
    offsets[static_cast<std::size_t>(p)].resize(static_cast<std::size_t>(n_comp));
    for (int c = 0; c < n_comp; ++c) {
      offsets[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] = total;
      total += space.components_[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)].dim();
    }
  }

  // Glue across interfaces (H1 only; geometry constructors validated the
  // control nets, here the solution spaces along the interface must match).
  UnionFind uf(total);
  if (kind == ProblemKind::H1) {
    for (const Interface& itf : geom.interfaces()) {
      const TensorSplineSpace& sa =
          space.components_[static_cast<std::size_t>(itf.patch_a)][0];
      const TensorSplineSpace& sb =
          space.components_[static_cast<std::size_t>(itf.patch_b)][0];

      // Tangential solution factors must agree under the orientation.
      std::vector<int> tang_a, tang_b;
      for (int axis = 0; axis < d; ++axis) {
        if (axis != itf.face_a / 2) tang_a.push_back(axis);
        if (axis != itf.face_b / 2) tang_b.push_back(axis);
      }
      for (std::size_t k = 0; k < tang_a.size(); ++k) {
        const bool reversed = (d == 2) && (itf.orientation == 1);
        if (!knots_equal(sa.factor(tang_a[k]), sb.factor(tang_b[k]), reversed))
          throw ValidationError(fmt::format(
              "interface {}<->{}: solution spaces do not match along the interface",
              itf.patch_a, itf.patch_b));
      }

      const auto idx_a = face_indices(sa, itf.face_a);
      const auto idx_b = orient_face_indices(sb, itf.face_b, itf.orientation);
      for (std::size_t i = 0; i < idx_a.size(); ++i)
        uf.unite(offsets[static_cast<std::size_t>(itf.patch_a)][0] + idx_a[i],
                 offsets[static_cast<std::size_t>(itf.patch_b)][0] + idx_b[i]);
    }
  }

  // Collect Dirichlet flags on provisional ids.
  std::set<std::pair<int, int>> interface_faces;
  for (const Interface& itf : geom.interfaces()) {
    interface_faces.insert({itf.patch_a, itf.face_a});
    interface_faces.insert({itf.patch_b, itf.face_b});
  }
  std::vector<char> constrained(static_cast<std::size_t>(total), 0);
  if (options.apply_dirichlet) {
    for (int p = 0; p < geom.num_patches(); ++p) {
      for (int face = 0; face < 2 * d; ++face) {
        if (interface_faces.count({p, face})) continue;
        const int face_axis = face / 2;
        for (int c = 0; c < n_comp; ++c) {
          // PEC condition constrains tangential components only; the scalar
          // H1 space is constrained on every boundary face.
          if (kind == ProblemKind::HCurl && c == face_axis) continue;
          const auto idx = face_indices(
              space.components_[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)], face);
          for (long f : idx)
            constrained[static_cast<std::size_t>(
                offsets[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] + f)] = 1;
        }
      }
    }
  }

  // A glued dof is constrained if any of its aliases is.
  std::vector<char> rep_constrained(static_cast<std::size_t>(total), 0);
  for (long i = 0; i < total; ++i)
    if (constrained[static_cast<std::size_t>(i)]) rep_constrained[static_cast<std::size_t>(uf.find(i))] = 1;

  // Number representatives in provisional order: glued ids, then active ids.
  std::vector<long> glued_id(static_cast<std::size_t>(total), -1);
  std::vector<long> active_of_glued;
  long n_glued = 0;
  long n_active = 0;
  for (long i = 0; i < total; ++i) {
    if (uf.find(i) != i) continue;
    glued_id[static_cast<std::size_t>(i)] = n_glued++;
    active_of_glued.push_back(rep_constrained[static_cast<std::size_t>(i)] ? -1 : n_active++);
  }

  space.num_glued_ = static_cast<int>(n_glued);
  space.num_active_ = static_cast<int>(n_active);
  if (space.num_active_ == 0)
    throw ValidationError("space: no active dofs remain after boundary elimination");

  space.active_.resize(static_cast<std::size_t>(geom.num_patches()));
  for (int p = 0; p < geom.num_patches(); ++p) {
    auto& per_patch = space.active_[static_cast<std::size_t>(p)];
    per_patch.resize(static_cast<std::size_t>(n_comp));
    for (int c = 0; c < n_comp; ++c) {
      const long n = space.components_[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)].dim();
      auto& map = per_patch[static_cast<std::size_t>(c)];
      map.resize(static_cast<std::size_t>(n));
      for (long f = 0; f < n; ++f) {
        const long rep = uf.find(offsets[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] + f);
        map[static_cast<std::size_t>(f)] = active_of_glued[static_cast<std::size_t>(glued_id[static_cast<std::size_t>(rep)])];
      }
    }
  }
  return space;
}

const TensorSplineSpace& DiscreteSpace::component_space(int patch, int comp) const {
  return components_[static_cast<std::size_t>(patch)][static_cast<std::size_t>(comp)];
}

const SplineSpace1D& DiscreteSpace::base_space(int patch, int axis) const {
  return base_[static_cast<std::size_t>(patch)][static_cast<std::size_t>(axis)];
}

long DiscreteSpace::active_index(int patch, int comp, long flat) const {
  return active_[static_cast<std::size_t>(patch)][static_cast<std::size_t>(comp)][static_cast<std::size_t>(flat)];
}

}  // namespace igasens
