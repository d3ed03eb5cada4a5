#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rtrg/kernels.hpp"
#include "rtrg/spectral.hpp"

namespace rtrg {

struct TransitionSpec {
    std::pair<double, double> tc1_bracket{1e-3, 0.4};
    std::pair<double, double> tc2_bracket{0.05, 1.0};
    double t_tol = 1e-3;  // bisection stops once the bracket is narrower
    double track_dT = 0.05;
    double omega_c = kDefaultOmegaC;
    PoleOptions pole;
    AxisOptions axis;
};

struct Transition {
    std::optional<double> T; // absent: no sign change in the bracket
    std::size_t evaluations = 0;
    std::string note;
};

// h(T) = gamma_0(T) - Gamma_1*(T); positive once the pole pair sits above the
// leading axis singularity, or when the pole pair is gone
Transition find_tc1_numeric(double alpha, const TransitionSpec& spec = {});
// where the pole pair merges into two zero-frequency poles on the axis
Transition find_tc2_numeric(double alpha, const TransitionSpec& spec = {});

struct PhaseRow {
    double alpha = 0.0;
    std::optional<double> tc1_numeric, tc2_numeric;
    std::optional<double> tc1_analytic, tc2_analytic, tc2_small_g;
    std::vector<std::string> flags;
};

// rows are independent; a failing row keeps its flags and the scan continues
std::vector<PhaseRow> scan_phase_diagram(const std::vector<double>& alpha_grid, const TransitionSpec& spec = {},
                                         Exec exec = Exec::Parallel);
PhaseRow closed_form_row(double alpha);

void write_phase_csv(std::ostream& os, const std::vector<PhaseRow>& rows);
// closed forms next to the numeric values and the NIBA constant
void write_comparison_csv(std::ostream& os, const std::vector<PhaseRow>& rows);
void write_phase_gnuplot(std::ostream& os, const std::string& csv_name);

} // namespace rtrg
