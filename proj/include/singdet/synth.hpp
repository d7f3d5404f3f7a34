#pragma once

#include "singdet/local_geometry.hpp"
#include "singdet/scoring.hpp"

#include <string>
#include <vector>

namespace singdet {

enum class Shape {
  Circle,         ///< unit circle in R^2
  Sphere,         ///< unit d-sphere in R^(d+1)
  TwoCircles,     ///< unit circles centred (+-1/2, 0)
  TwoSpheres,     ///< unit d-spheres in R^(d+1), centres 1 apart
  SolidBall,      ///< filled unit d-ball in R^d
  TwoDisks,       ///< two unit 2d-disks in R^(3d) sharing a d-disk
  Cone,           ///< double cone z^2 = x^2 + y^2, unit slant length
  PinchTorus,     ///< torus whose tube shrinks to a point at one angle
  Ellipsoid,      ///< d-ellipsoid with seed-drawn semi-axes in [0.6, 1.4]
  Torus,          ///< ring torus R = 1, r = 0.35
  SphereProduct,  ///< S^1 x S^1 in R^4
  HollowCube,     ///< surface of [-1, 1]^3
  ThreeDisks,     ///< unit disks in the three coordinate planes of R^3
};

std::string shape_name(Shape shape);
Shape parse_shape(const std::string& name);

struct ShapeSpec {
  Shape shape = Shape::Circle;
  int dim = 1;  ///< stratum dimension d where the shape takes one
  Index n = 1000;
  double noise = 0.01;
  std::uint64_t seed = 0;
};

struct LabeledCloud {
  PointCloud cloud;
  std::vector<double> dist_to_singular;  ///< +inf without a singular locus
};

/// Semi-axes used for Shape::Ellipsoid (drawn from the spec seed).
std::vector<double> ellipsoid_axes(const ShapeSpec& spec);

/// Ambient dimension of a generated shape.
int ambient_dim(const ShapeSpec& spec);

/// Exact distance from x to the singular locus of the noiseless shape.
double singular_distance(const ShapeSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// Area-uniform sample on each stratum plus uniform noise in [-a, a]^D.
/// Distances are measured from the noiseless sample points.
LabeledCloud generate(const ShapeSpec& spec);

/// 1 where dist_to_singular <= s.
Labels ground_truth_labels(const LabeledCloud& labeled, double s);

struct ScaledParams {
  double radius = 0.0;
  Index n = 0;
};

/// (r0^(1/d), round(N0 * growth^d))
ScaledParams scaled_experiment_params(int d, double r0, double n0, double growth);

struct BenchmarkCloud {
  std::string name;
  bool is_manifold = false;
  LabeledCloud data;
};

/// Manifolds (sphere, ellipsoid, S^1 x S^1, torus) and stratified spaces (two
/// spheres, cone, hollow cube, three disks), `instances` seeded copies each.
std::vector<BenchmarkCloud> mh_benchmark(Index sample_size, std::uint64_t seed, int instances = 2,
                                         double noise = 0.01);

}  // namespace singdet
