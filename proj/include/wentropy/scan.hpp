#pragma once

// Grid scans: the relative DE / relative WE of the pair given X3 over a
// rectangular (rho, x3) grid for either worked example.

#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "closed_form.hpp"
#include "error.hpp"
#include "gaussian.hpp"
#include "numeric_utils.hpp"

namespace wentropy::scan {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t steps = 2;

    double at(std::size_t k) const {
        if (steps == 1) return lo;
        if (k + 1 == steps) return hi;
        return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    }

    std::string str() const {
        return format_real(lo) + ":" + format_real(hi) + ":" + std::to_string(steps);
    }

    /// "lo:hi:steps".
    static Range parse(const std::string& text, const std::string& what) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3)
            throw Error(ErrorCode::InvalidArgument, what + " must be lo:hi:steps, got \"" + text + "\"");
        Range r;
        try {
            std::size_t used = 0;
            r.lo = std::stod(parts[0], &used);
            if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
            r.hi = std::stod(parts[1], &used);
            if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
            const long long s = std::stoll(parts[2], &used);
            if (used != parts[2].size() || s < 0) throw std::invalid_argument(parts[2]);
            r.steps = static_cast<std::size_t>(s);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, what + " must be lo:hi:steps, got \"" + text + "\"");
        }
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
            throw Error(ErrorCode::InvalidArgument, what + " needs finite lo <= hi");
        return r;
    }
};

enum class Mode { paper, corrected, wick };

inline Mode parse_mode(const std::string& s) {
    if (s == "paper") return Mode::paper;
    if (s == "corrected") return Mode::corrected;
    if (s == "wick") return Mode::wick;
    throw Error(ErrorCode::InvalidArgument, "unknown mode \"" + s + "\" (paper, corrected, wick)");
}

inline const char* to_string(Mode m) {
    switch (m) {
    case Mode::paper: return "paper";
    case Mode::corrected: return "corrected";
    case Mode::wick: return "wick";
    }
    return "?";
}

struct ScanGrid {
    int example = 1;
    Range rho{-0.7, 0.7, 29};
    Range x3{-3.0, 3.0, 31};
    std::set<Mode> modes{Mode::paper, Mode::corrected, Mode::wick};

    /// Throws naming the violated validity bound.
    void validate() const {
        if (example != 1 && example != 2)
            throw Error(ErrorCode::InvalidArgument, "example must be 1 or 2");
        if (rho.steps < 2 || x3.steps < 2)
            throw Error(ErrorCode::InvalidArgument, "every range needs at least 2 steps");
        if (modes.empty()) throw Error(ErrorCode::InvalidArgument, "no modes selected");
        if (example == 2) {
            if (!(rho.lo > 0.0 && rho.hi < 0.5))
                throw Error(ErrorCode::DomainError, "rho outside (0, 0.5)");
        } else {
            const double m = std::max(std::abs(rho.lo), std::abs(rho.hi));
            if (!(1.0 - m * m - m * m * m * m > 0.0))
                throw Error(ErrorCode::DomainError, "rho outside 1 - rho^2 - rho^4 > 0");
        }
    }
};

struct Row {
    double rho, x3;
    double d_paper, d_corrected, dw_wick, dw_printed, gibbs_gap;
};

inline Row evaluate(int example, double rho, double x3) {
    namespace cf = closed_form;
    const cf::PairConditional pc(example == 1 ? example1_cov(rho) : example2_cov(rho), x3);
    return Row{rho,
               x3,
               cf::relative_de_pair(pc, EntropyMode::paper),
               cf::relative_de_pair(pc, EntropyMode::corrected),
               cf::relative_we_pair(pc, cf::FormulaMode::wick),
               example == 1 ? cf::example1::relative_we(rho, x3) : cf::example2::relative_we(rho, x3),
               cf::gibbs_gap(pc)};
}

inline std::vector<Row> run(const ScanGrid& grid) {
    grid.validate();
    std::vector<Row> rows;
    rows.reserve(grid.rho.steps * grid.x3.steps);
    for (std::size_t i = 0; i < grid.rho.steps; ++i)
        for (std::size_t k = 0; k < grid.x3.steps; ++k)
            rows.push_back(evaluate(grid.example, grid.rho.at(i), grid.x3.at(k)));
    return rows;
}

/// CSV with a versioned '#' header line; columns of unselected modes are
/// left empty.
inline void write_csv(std::ostream& out, const ScanGrid& grid, const std::vector<Row>& rows) {
    out << "# wentropy-scan v1 example=" << grid.example << " rho=" << grid.rho.str()
        << " x3=" << grid.x3.str() << " modes=";
    bool first = true;
    for (Mode m : grid.modes) {
        out << (first ? "" : ",") << to_string(m);
        first = false;
    }
    out << '\n' << "rho,x3,D_paper,D_corrected,Dw_wick,Dw_printed,gibbs_gap\n";
    const bool paper = grid.modes.count(Mode::paper) > 0;
    const bool corrected = grid.modes.count(Mode::corrected) > 0;
    const bool wick = grid.modes.count(Mode::wick) > 0;
    for (const Row& r : rows) {
        out << format_real(r.rho) << ',' << format_real(r.x3) << ','
            << (paper ? format_real(r.d_paper) : "") << ','
            << (corrected ? format_real(r.d_corrected) : "") << ','
            << (wick ? format_real(r.dw_wick) : "") << ','
            << (paper ? format_real(r.dw_printed) : "") << ',' << format_real(r.gibbs_gap) << '\n';
    }
}

}  // namespace wentropy::scan
