/*
 * Copyright (C) 2026 The Holonomy Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

#ifndef HOLONOMY__GEOMETRY_HPP
#define HOLONOMY__GEOMETRY_HPP

#include <holonomy/tiling.hpp>

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace holonomy {

//==============================================================================
/// Point on the upper sheet of the hyperboloid x^2 + y^2 - z^2 = -1.
struct HPoint
{
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }

  /// Projects onto the hyperboloid by recomputing z from (x, y).
  static HPoint on_sheet(double x, double y);
  static HPoint from(const Eigen::Vector3d& v) { return on_sheet(v.x(), v.y()); }
};

/// Point of the open unit disk (Poincare or Klein model).
struct DiskPoint
{
  double u = 0.0;
  double v = 0.0;

  double norm() const;
};

/// The hyperboloid apex (0, 0, 1): centre of the fundamental square.
inline HPoint apex() { return {}; }

/// Minkowski bilinear form with signature diag(1, 1, -1).
double minkowski_dot(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
double minkowski_dot(const HPoint& a, const HPoint& b);

double hyperbolic_distance(const HPoint& a, const HPoint& b);

//==============================================================================
/// Orientation-preserving isometry of the hyperboloid model, acting on column
/// vectors.
class Isometry
{
public:
  Isometry() : _m(Eigen::Matrix3d::Identity()) {}
  explicit Isometry(const Eigen::Matrix3d& m) : _m(m) {}

  static Isometry identity() { return Isometry(); }

  /// Rotation by `angle` radians about the apex (counterclockwise).
  static Isometry rotation(double angle);

  /// Hyperbolic translation by `distance` along the x-axis.
  static Isometry translation_x(double distance);

  const Eigen::Matrix3d& matrix() const { return _m; }

  Isometry operator*(const Isometry& other) const { return Isometry(_m * other._m); }

  HPoint apply(const HPoint& p) const;

  /// Inverse via J m^T J, exact for Minkowski isometries.
  Isometry inverse() const;

  /// Re-orthonormalizes the columns with respect to the Minkowski form.
  Isometry renormalized() const;

  /// Largest entry of |m^T J m - J|.
  double form_error() const;

  double determinant() const { return _m.determinant(); }

  /// Largest entry-wise difference.
  double distance_to(const Isometry& other) const;

private:
  Eigen::Matrix3d _m;
};

//==============================================================================
struct TilingConstants
{
  /// Distance from a square's centre to the midpoint of an edge.
  double inradius;
  /// Distance from a square's centre to a corner.
  double circumradius;
  /// Translation by twice the inradius along the x-axis: centre to
  /// neighbouring centre.
  Isometry step_translation;
  /// Rotation by a quarter turn about the apex.
  Isometry quarter_turn;
};

const TilingConstants& tiling_constants();

/// Planar angle of edge `e` in a tile's own frame: edge 0 points along +y and
/// indices advance clockwise.
double edge_angle(EdgeIndex e);

/// Local transform from a tile's frame to the frame of the neighbour across
/// `exit`, given that the neighbour sees the tile across its edge `entry`.
Isometry neighbor_transform(EdgeIndex exit, EdgeIndex entry);

/// Frame placing the fundamental square onto `addr`. Identity for the origin.
Isometry tile_frame(const TileAddress& addr);

/// Frame reached by walking the raw step sequence `steps` from the root of
/// `branch`, each step turning relative to the direction of travel. The
/// sequence does not have to be canonical.
Isometry walk_frame(Branch branch, std::span<const Step> steps);

/// Frame of `to` expressed in the frame of `from`, composed along the
/// spanning-tree path between them. Numerically preferable to
/// tile_frame(from).inverse() * tile_frame(to) for deep addresses.
Isometry relative_frame(const TileAddress& from, const TileAddress& to);

HPoint tile_center(const Isometry& frame);

/// Corners of the fundamental square carried by `frame`, corner k lying
/// between edges k and k + 1.
std::vector<HPoint> tile_corners(const Isometry& frame);

//==============================================================================
DiskPoint to_poincare(const HPoint& p);
DiskPoint to_klein(const HPoint& p);

/// Points along the hyperbolic geodesic from `a` to `b`; t = 0 gives `a`.
HPoint geodesic_point(const HPoint& a, const HPoint& b, double t);

/// Poincare-disk outline of a tile: the four corners, each followed by
/// `samples_per_edge - 1` interior points of the geodesic edge to the next.
std::vector<DiskPoint> tile_polygon(const TileAddress& addr, int samples_per_edge);

/// Same as above with an explicit frame, e.g. one relative to a viewer.
std::vector<DiskPoint> tile_polygon(const Isometry& frame, int samples_per_edge);

/// Approximate direction from `from` to `to`, relative to the facing edge,
/// wrapped to (-pi, pi]. Positive angles are counterclockwise, so a target to
/// the right of the facing direction gives a negative angle. Throws
/// std::invalid_argument when from == to.
double direction_angle(const TileAddress& from, EdgeIndex from_facing, const TileAddress& to);

} // namespace holonomy

#endif // HOLONOMY__GEOMETRY_HPP
