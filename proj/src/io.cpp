#include "magnomech/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace magnomech {

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::string schedule_csv(const PulseSchedule& schedule, int samples) {
    if (samples < 2) throw std::invalid_argument("schedule dump needs >= 2 samples");
    std::ostringstream out;
    out << "t,delta,g_real,g_imag,theta_dot\n";
    for (int i = 0; i < samples; ++i) {
        const double t = schedule.T * i / double(samples - 1);
        const ControlSample s = schedule.at(t);
        out << format_number(t) << ',' << format_number(s.delta) << ','
            << format_number(s.g_real) << ',' << format_number(s.g_imag) << ','
            << format_number(s.theta_dot) << '\n';
    }
    return out.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::ostringstream out;
    out << "t,population,norm_drift\n";
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        out << format_number(trajectory.times[i]) << ','
            << format_number(trajectory.populations[i]) << ','
            << format_number(trajectory.norm_drift) << '\n';
    }
    return out.str();
}

std::string grid_csv(const SweepGrid& grid) {
    std::ostringstream out;
    out << "gamma\\eta";
    for (double eta : grid.eta_values) out << ',' << format_number(eta);
    out << '\n';
    for (std::size_t r = 0; r < grid.gamma_values.size(); ++r) {
        out << format_number(grid.gamma_values[r]);
        for (std::size_t c = 0; c < grid.eta_values.size(); ++c) {
            out << ',' << format_number(grid.populations(r, c));
        }
        out << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file << content;
    if (!file) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream out;
    out << file.rdbuf();
    return out.str();
}

}  // namespace magnomech
