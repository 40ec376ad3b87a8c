#pragma once

#include "twinlane/harness/config.hpp"
#include "twinlane/world.hpp"

namespace twinlane::harness {

/// Pairwise course: pair i has its left cone first, then its right cone,
/// offset half a lane width along the centreline normal. The vehicle starts
/// on the centreline at its origin, facing along it.
///   straight: centreline y = 0, pairs every `spacing` metres from x = spacing
///   slalom:   y = amplitude * sin(2 pi x / period), same x stations
///   arc:      left-turning circle of `radius`, pairs every `spacing` of arc
Course generate_course(const CourseSpec& spec);

/// Course named by the scenario: file when course_path is set, otherwise
/// generated. Cone geometry comes from the scenario.
Course scenario_course(const ScenarioConfig& cfg);

}  // namespace twinlane::harness
