#pragma once

#include <string>

#include "magnomech/analysis.hpp"
#include "magnomech/dynamics.hpp"
#include "magnomech/protocols.hpp"

namespace magnomech {

/// Fixed 12-significant-digit formatting used by every CSV emitter, so that
/// identical configs give byte-identical files.
std::string format_number(double value);

std::string schedule_csv(const PulseSchedule& schedule, int samples = 501);
std::string trajectory_csv(const Trajectory& trajectory);
std::string grid_csv(const SweepGrid& grid);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace magnomech
