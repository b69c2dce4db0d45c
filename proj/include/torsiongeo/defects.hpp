// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "torsiongeo/catalog.hpp"
#include "torsiongeo/geometry.hpp"

namespace torsiongeo {

// Closed polygon in the (q1, q2) plane; the last vertex repeats the first.
struct Contour {
  std::vector<Point> vertices;
  int winding = 0;  // about the origin, filled by validate_contour
  bool encloses_origin() const { return winding != 0; }
};

// Samples `segments * turns` edges of a circle traversed `turns` times
// counter-clockwise.
Contour circle_contour(const Point& center, double radius, int segments, int turns = 1);

// Closes the polygon if needed, checks distinct consecutive vertices and
// that no edge touches the origin (OriginOnContour), and sets the winding.
void validate_contour(Contour& contour);

struct AngleTrack {
  std::vector<double> phi;  // continued angle at each vertex
  double total = 0.0;       // phi.back() - phi.front()
  int winding = 0;
};

// Branch continuation of atan2 along the contour: each edge adds the
// increment wrapped into (-pi, pi].
AngleTrack multivalued_angle_along(const Contour& contour);

enum class DefectKind { dislocation, disclination };

struct DefectGeometry {
  DefectKind kind = DefectKind::dislocation;
  double parameter = 0.0;
  TriadPtr triad;            // dislocation dyad, or the disclination chart triad
  TriadPtr metric_geometry;  // disclination only: metric-only first-order metric
};

DefectGeometry dislocation_geometry(double epsilon);
// Throws ParameterOutOfRange unless |omega| < bound.
DefectGeometry disclination_geometry(double omega, double bound = 0.1);

// b^i = closed integral of e^i_mu dq^mu by the trapezoid rule on the vertices.
Vector burgers_vector(const TriadField& triad, const Contour& contour);
Vector burgers_vector(const DefectGeometry& defect, const Contour& contour);

// Closure failure in chart coordinates of a closed flat-space polygon:
// integrates dq/ds = e^{-1}(q) dx/ds with RK4 (`substeps` per edge) starting
// at q = x_0 and returns q_end - q_start.
Vector reciprocal_burgers_vector(const DefectGeometry& defect, const Contour& x_contour, int substeps = 8);

// Change of the rotation field omega = (e^2_1 - e^1_2) / 2 along the contour,
// with the angle continued along the contour.
double frank_rotation_deficit(const DefectGeometry& defect, const Contour& contour);

// Rotation angle of a vector parallel-transported once around the contour
// with the chosen connection, measured in the metric at the start vertex.
double holonomy_rotation_angle(const GeometryBundle& bundle, const Contour& contour, ConnectionKind mode,
                               int substeps = 4);

}  // namespace torsiongeo
