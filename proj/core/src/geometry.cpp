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

#include <holonomy/geometry.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace holonomy {

namespace {

constexpr double pi = std::numbers::pi;

const Eigen::Matrix3d& minkowski_form()
{
  static const Eigen::Matrix3d j = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
  return j;
}

int turn_of(Step s)
{
  switch (s)
  {
    case Step::F: return 0;
    case Step::L: return -1;
    case Step::R: return 1;
  }
  return 0;
}

} // namespace

//==============================================================================
HPoint HPoint::on_sheet(double x, double y)
{
  return {x, y, std::sqrt(1.0 + x * x + y * y)};
}

double DiskPoint::norm() const
{
  return std::hypot(u, v);
}

double minkowski_dot(const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
  return a.x() * b.x() + a.y() * b.y() - a.z() * b.z();
}

double minkowski_dot(const HPoint& a, const HPoint& b)
{
  return minkowski_dot(a.vec(), b.vec());
}

double hyperbolic_distance(const HPoint& a, const HPoint& b)
{
  // <a - b, a - b> = 4 sinh^2(d / 2); stable for nearby points.
  const Eigen::Vector3d diff = a.vec() - b.vec();
  const double chord = std::sqrt(std::max(0.0, minkowski_dot(diff, diff)));
  return 2.0 * std::asinh(chord / 2.0);
}

//==============================================================================
Isometry Isometry::rotation(double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d m;
  m << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return Isometry(m);
}

Isometry Isometry::translation_x(double distance)
{
  const double ch = std::cosh(distance);
  const double sh = std::sinh(distance);
  Eigen::Matrix3d m;
  m << ch, 0.0, sh,
       0.0, 1.0, 0.0,
       sh, 0.0, ch;
  return Isometry(m);
}

HPoint Isometry::apply(const HPoint& p) const
{
  return HPoint::from(_m * p.vec());
}

Isometry Isometry::inverse() const
{
  const auto& j = minkowski_form();
  return Isometry(j * _m.transpose() * j);
}

Isometry Isometry::renormalized() const
{
  Eigen::Vector3d c0 = _m.col(0);
  Eigen::Vector3d c1 = _m.col(1);
  Eigen::Vector3d c2 = _m.col(2);

  c2 /= std::sqrt(-minkowski_dot(c2, c2));
  c0 += minkowski_dot(c0, c2) * c2;
  c0 /= std::sqrt(minkowski_dot(c0, c0));
  c1 += minkowski_dot(c1, c2) * c2;
  c1 -= minkowski_dot(c1, c0) * c0;
  c1 /= std::sqrt(minkowski_dot(c1, c1));

  Eigen::Matrix3d m;
  m.col(0) = c0;
  m.col(1) = c1;
  m.col(2) = c2;
  return Isometry(m);
}

double Isometry::form_error() const
{
  const auto& j = minkowski_form();
  return (_m.transpose() * j * _m - j).cwiseAbs().maxCoeff();
}

double Isometry::distance_to(const Isometry& other) const
{
  return (_m - other._m).cwiseAbs().maxCoeff();
}

//==============================================================================
const TilingConstants& tiling_constants()
{
  static const TilingConstants constants = []
    {
      // Square with corner angle 2*pi/5.
      const double inradius = std::acosh(std::cos(pi / 5.0) / std::sin(pi / 4.0));
      const double circumradius =
        std::acosh(1.0 / std::tan(pi / 4.0) / std::tan(pi / 5.0));
      return TilingConstants{
        inradius,
        circumradius,
        Isometry::translation_x(2.0 * inradius),
        Isometry::rotation(pi / 2.0)};
    }();
  return constants;
}

double edge_angle(EdgeIndex e)
{
  return pi / 2.0 - e.value() * (pi / 2.0);
}

Isometry neighbor_transform(EdgeIndex exit, EdgeIndex entry)
{
  const auto& k = tiling_constants();
  return Isometry::rotation(edge_angle(exit))
    * k.step_translation
    * Isometry::rotation(pi - edge_angle(entry));
}

Isometry tile_frame(const TileAddress& addr)
{
  if (addr.is_origin())
    return Isometry::identity();
  return walk_frame(addr.branch(), addr.steps());
}

Isometry walk_frame(Branch branch, std::span<const Step> steps)
{
  const EdgeIndex back(0);
  Isometry frame = neighbor_transform(EdgeIndex(static_cast<int>(branch)), back);
  for (const Step s : steps)
  {
    frame = (frame * neighbor_transform(EdgeIndex(2 + turn_of(s)), back)).renormalized();
  }
  return frame;
}

Isometry relative_frame(const TileAddress& from, const TileAddress& to)
{
  if (from == to)
    return Isometry::identity();

  // Climb both addresses to their lowest common ancestor.
  std::vector<TileAddress> up{from};
  std::vector<TileAddress> down{to};
  while (up.back() != down.back())
  {
    if (up.back().depth() >= down.back().depth())
      up.push_back(*parent(up.back()));
    else
      down.push_back(*parent(down.back()));
  }
  down.pop_back();

  std::vector<TileAddress> path = std::move(up);
  path.insert(path.end(), down.rbegin(), down.rend());

  Isometry frame;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
  {
    const EdgeIndex exit = *edge_toward(path[i], path[i + 1]);
    const EdgeIndex entry = *edge_toward(path[i + 1], path[i]);
    frame = (frame * neighbor_transform(exit, entry)).renormalized();
  }
  return frame;
}

HPoint tile_center(const Isometry& frame)
{
  return frame.apply(apex());
}

std::vector<HPoint> tile_corners(const Isometry& frame)
{
  const double r = tiling_constants().circumradius;
  std::vector<HPoint> corners;
  corners.reserve(4);
  for (int k = 0; k < 4; ++k)
  {
    const double phi = edge_angle(EdgeIndex(k)) - pi / 4.0;
    const HPoint local{std::sinh(r) * std::cos(phi), std::sinh(r) * std::sin(phi), std::cosh(r)};
    corners.push_back(frame.apply(local));
  }
  return corners;
}

//==============================================================================
DiskPoint to_poincare(const HPoint& p)
{
  return {p.x / (1.0 + p.z), p.y / (1.0 + p.z)};
}

DiskPoint to_klein(const HPoint& p)
{
  return {p.x / p.z, p.y / p.z};
}

HPoint geodesic_point(const HPoint& a, const HPoint& b, double t)
{
  const double d = hyperbolic_distance(a, b);
  if (d < 1e-12)
    return a;
  const double wa = std::sinh((1.0 - t) * d) / std::sinh(d);
  const double wb = std::sinh(t * d) / std::sinh(d);
  return HPoint::from(wa * a.vec() + wb * b.vec());
}

std::vector<DiskPoint> tile_polygon(const TileAddress& addr, int samples_per_edge)
{
  return tile_polygon(tile_frame(addr), samples_per_edge);
}

std::vector<DiskPoint> tile_polygon(const Isometry& frame, int samples_per_edge)
{
  if (samples_per_edge < 1)
    throw std::invalid_argument("samples_per_edge must be positive");

  const auto corners = tile_corners(frame);
  std::vector<DiskPoint> out;
  out.reserve(4 * static_cast<std::size_t>(samples_per_edge));
  for (std::size_t k = 0; k < corners.size(); ++k)
  {
    const HPoint& a = corners[k];
    const HPoint& b = corners[(k + 1) % corners.size()];
    for (int i = 0; i < samples_per_edge; ++i)
    {
      const double t = static_cast<double>(i) / samples_per_edge;
      out.push_back(to_poincare(i == 0 ? a : geodesic_point(a, b, t)));
    }
  }
  return out;
}

double direction_angle(const TileAddress& from, EdgeIndex from_facing, const TileAddress& to)
{
  if (from == to)
    throw std::invalid_argument("direction to the current tile is undefined");

  const HPoint target = tile_center(relative_frame(from, to));
  double angle = std::atan2(target.y, target.x) - edge_angle(from_facing);
  while (angle <= -pi)
    angle += 2.0 * pi;
  while (angle > pi)
    angle -= 2.0 * pi;
  return angle;
}

} // namespace holonomy
