#ifndef QPC_CIRCLE_IO_HPP
#define QPC_CIRCLE_IO_HPP

#include <iosfwd>
#include <string>

#include "qpc/continuation.hpp"
#include "qpc/solver.hpp"

namespace qpc {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CircleFileData {
    int schema_version = 1;
    MapSpec spec;
    CircleSystem system;
    UnfoldingState unfolding;
    double final_defect = 0.0;
    Point2 seed;
    Point2 center;
    PhaseCondition phase;
    long m_rho = 0;
    long m_coeff = 0;
    std::string created;  // preserved verbatim on round trip
};

struct FamilyFileData {
    int schema_version = 1;
    MapSpec spec;
    StopReason stop_reason = StopReason::MaxSteps;
    std::vector<CircleFileData> records;
    std::vector<std::vector<std::pair<double, double>>> sobolev;  // per record
};

void write_circle(std::ostream& os, const CircleFileData& data);
CircleFileData read_circle(std::istream& is);
void write_circle_file(const std::string& path, const CircleFileData& data);
CircleFileData read_circle_file(const std::string& path);

void write_family(std::ostream& os, const FamilyFileData& data);
FamilyFileData read_family(std::istream& is);
void write_family_file(const std::string& path, const FamilyFileData& data);
FamilyFileData read_family_file(const std::string& path);

// CSV samples (theta,x,y,component_index) for plotting.
void write_plot_csv(std::ostream& os, const CircleSystem& sys, int samples,
                    bool mod_2pi = false);

std::string stop_reason_name(StopReason r);

// %.17g formatting used across the file formats.
std::string format_double(double v);

}  // namespace qpc

#endif
