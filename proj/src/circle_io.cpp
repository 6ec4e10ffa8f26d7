#include "qpc/circle_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qpc/projection.hpp"

namespace qpc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::SobolevBlowup: return "sobolev_blowup";
        case StopReason::StepUnderflow: return "step_underflow";
        case StopReason::MaxSteps: return "max_steps";
        case StopReason::SolverHardFailure: return "solver_hard_failure";
    }
    return "unknown";
}

namespace {

StopReason stop_reason_from_name(const std::string& s) {
    if (s == "sobolev_blowup") return StopReason::SobolevBlowup;
    if (s == "step_underflow") return StopReason::StepUnderflow;
    if (s == "max_steps") return StopReason::MaxSteps;
    if (s == "solver_hard_failure") return StopReason::SolverHardFailure;
    throw io_error("unknown stop reason: " + s);
}

std::string next_line(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw io_error("unexpected end of file");
    return line;
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw io_error("bad number: " + s);
        return v;
    } catch (const std::exception&) {
        throw io_error("bad number: " + s);
    }
}

long to_long(const std::string& s) {
    try {
        return std::stol(s);
    } catch (const std::exception&) {
        throw io_error("bad integer: " + s);
    }
}

}  // namespace

void write_circle(std::ostream& os, const CircleFileData& data) {
    os << "qpcirc-circle " << data.schema_version << "\n";
    os << "map " << family_name(data.spec.family) << "\n";
    os << "alpha " << format_double(data.spec.alpha) << "\n";
    os << "d " << data.system.d << "\n";
    os << "n_modes " << data.system.order() << "\n";
    os << "rho " << format_double(data.system.rho) << "\n";
    os << "beta " << format_double(data.unfolding.beta) << "\n";
    for (size_t j = 0; j < data.unfolding.gamma.size(); ++j)
        os << "unfold " << j << " " << format_double(data.unfolding.gamma[j]) << " "
           << format_double(data.unfolding.omega[j]) << "\n";
    os << "defect " << format_double(data.final_defect) << "\n";
    os << "seed " << format_double(data.seed.x) << " " << format_double(data.seed.y)
       << "\n";
    os << "center " << format_double(data.center.x) << " "
       << format_double(data.center.y) << "\n";
    os << "phase " << format_double(data.phase.pbar.x) << " "
       << format_double(data.phase.pbar.y) << " " << format_double(data.phase.eta.x)
       << " " << format_double(data.phase.eta.y) << "\n";
    os << "m_rho " << data.m_rho << "\n";
    os << "m_coeff " << data.m_coeff << "\n";
    os << "created " << data.created << "\n";
    int N = data.system.order();
    for (int j = 0; j < data.system.d; ++j) {
        os << "circle " << j << "\n";
        const FourierCircle& K = data.system.circles[j];
        for (int n = -N; n <= N; ++n) {
            os << "coef " << n << " " << format_double(K.a.at(n).real()) << " "
               << format_double(K.a.at(n).imag()) << " "
               << format_double(K.b.at(n).real()) << " "
               << format_double(K.b.at(n).imag()) << "\n";
        }
    }
    os << "end\n";
}

CircleFileData read_circle(std::istream& is) {
    CircleFileData data;
    std::vector<std::string> head = split(next_line(is));
    if (head.size() != 2 || head[0] != "qpcirc-circle")
        throw io_error("not a circle file");
    data.schema_version = static_cast<int>(to_long(head[1]));
    if (data.schema_version != 1)
        throw io_error("unsupported schema version " + head[1]);

    int d = 0, N = 0;
    int current = -1;
    bool done = false;
    while (!done) {
        std::string line = next_line(is);
        std::vector<std::string> t = split(line);
        if (t.empty()) continue;
        const std::string& key = t[0];
        if (key == "end") {
            done = true;
        } else if (key == "map") {
            data.spec.family = family_from_name(t.at(1));
        } else if (key == "alpha") {
            data.spec.alpha = to_double(t.at(1));
        } else if (key == "d") {
            d = static_cast<int>(to_long(t.at(1)));
            data.system.d = d;
        } else if (key == "n_modes") {
            N = static_cast<int>(to_long(t.at(1)));
        } else if (key == "rho") {
            data.system.rho = to_double(t.at(1));
        } else if (key == "beta") {
            data.unfolding.beta = to_double(t.at(1));
        } else if (key == "unfold") {
            size_t j = static_cast<size_t>(to_long(t.at(1)));
            if (data.unfolding.gamma.size() <= j) {
                data.unfolding.gamma.resize(j + 1, 0.0);
                data.unfolding.omega.resize(j + 1, 0.0);
            }
            data.unfolding.gamma[j] = to_double(t.at(2));
            data.unfolding.omega[j] = to_double(t.at(3));
        } else if (key == "defect") {
            data.final_defect = to_double(t.at(1));
        } else if (key == "seed") {
            data.seed = {to_double(t.at(1)), to_double(t.at(2))};
        } else if (key == "center") {
            data.center = {to_double(t.at(1)), to_double(t.at(2))};
        } else if (key == "phase") {
            data.phase.pbar = {to_double(t.at(1)), to_double(t.at(2))};
            data.phase.eta = {to_double(t.at(3)), to_double(t.at(4))};
        } else if (key == "m_rho") {
            data.m_rho = to_long(t.at(1));
        } else if (key == "m_coeff") {
            data.m_coeff = to_long(t.at(1));
        } else if (key == "created") {
            data.created = line.size() > 8 ? line.substr(8) : "";
        } else if (key == "circle") {
            current = static_cast<int>(to_long(t.at(1)));
            if (current != static_cast<int>(data.system.circles.size()))
                throw io_error("circle blocks out of order");
            data.system.circles.emplace_back(N);
        } else if (key == "coef") {
            if (current < 0) throw io_error("coef before circle header");
            int n = static_cast<int>(to_long(t.at(1)));
            if (n < -N || n > N) throw io_error("coef index out of range");
            FourierCircle& K = data.system.circles[current];
            K.a.at(n) = {to_double(t.at(2)), to_double(t.at(3))};
            K.b.at(n) = {to_double(t.at(4)), to_double(t.at(5))};
        } else {
            throw io_error("unknown key: " + key);
        }
    }
    if (data.system.circles.size() != static_cast<size_t>(d))
        throw io_error("circle count does not match d");
    return data;
}

void write_circle_file(const std::string& path, const CircleFileData& data) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_circle(os, data);
}

CircleFileData read_circle_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    return read_circle(is);
}

void write_family(std::ostream& os, const FamilyFileData& data) {
    os << "qpcirc-family " << data.schema_version << "\n";
    os << "stop_reason " << stop_reason_name(data.stop_reason) << "\n";
    os << "records " << data.records.size() << "\n";
    for (size_t k = 0; k < data.records.size(); ++k) {
        os << "record " << k << "\n";
        if (k < data.sobolev.size())
            for (auto& [order, norm] : data.sobolev[k])
                os << "sobolev " << format_double(order) << " " << format_double(norm)
                   << "\n";
        write_circle(os, data.records[k]);
    }
    os << "endfamily\n";
}

FamilyFileData read_family(std::istream& is) {
    FamilyFileData data;
    std::vector<std::string> head = split(next_line(is));
    if (head.size() != 2 || head[0] != "qpcirc-family")
        throw io_error("not a family file");
    data.schema_version = static_cast<int>(to_long(head[1]));
    if (data.schema_version != 1)
        throw io_error("unsupported schema version " + head[1]);
    std::vector<std::string> t = split(next_line(is));
    if (t.size() != 2 || t[0] != "stop_reason") throw io_error("missing stop_reason");
    data.stop_reason = stop_reason_from_name(t[1]);
    t = split(next_line(is));
    if (t.size() != 2 || t[0] != "records") throw io_error("missing records count");
    long count = to_long(t[1]);
    for (long k = 0; k < count; ++k) {
        t = split(next_line(is));
        if (t.size() != 2 || t[0] != "record" || to_long(t[1]) != k)
            throw io_error("bad record header");
        std::vector<std::pair<double, double>> sob;
        std::streampos pos = is.tellg();
        std::string line;
        while (std::getline(is, line)) {
            std::vector<std::string> s = split(line);
            if (!s.empty() && s[0] == "sobolev") {
                sob.emplace_back(to_double(s.at(1)), to_double(s.at(2)));
                pos = is.tellg();
            } else {
                is.seekg(pos);
                break;
            }
        }
        data.sobolev.push_back(std::move(sob));
        data.records.push_back(read_circle(is));
        if (!data.records.empty() && data.records.back().spec.alpha != 0.0)
            data.spec = data.records.back().spec;
    }
    t = split(next_line(is));
    if (t.empty() || t[0] != "endfamily") throw io_error("missing endfamily");
    return data;
}

void write_family_file(const std::string& path, const FamilyFileData& data) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_family(os, data);
}

FamilyFileData read_family_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    return read_family(is);
}

void write_plot_csv(std::ostream& os, const CircleSystem& sys, int samples,
                    bool mod_2pi) {
    const double twopi = 2.0 * std::acos(-1.0);
    os << "theta,x,y,component_index\n";
    for (int j = 0; j < sys.d; ++j) {
        for (int g = 0; g < samples; ++g) {
            double theta = static_cast<double>(g) / samples;
            Point2 p = eval(sys.circles[j], theta);
            double x = p.x;
            if (mod_2pi) x = x - twopi * std::floor(x / twopi);
            os << format_double(theta) << "," << format_double(x) << ","
               << format_double(p.y) << "," << j << "\n";
        }
    }
}

}  // namespace qpc
