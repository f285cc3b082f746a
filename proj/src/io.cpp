// io.cpp: CSV import/export for map trajectories and observable series

#include "tpf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tpf::io {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what)
{
    std::ostringstream msg;
    msg << "map file line " << line << ": " << what;
    throw std::runtime_error(msg.str());
}

} // namespace

std::string format_number(double x)
{
    if (x == 0.0) x = 0.0;  // no negative zero in outputs
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_map_trajectory(std::ostream& os, const dyn::MapTrajectory& traj)
{
    const int d = traj.dim();
    const int n = d * d * d * d;
    os << "# tpflux-map-trajectory v1\n";
    os << "# dim=" << d << "\n";
    os << "# convention=column-stacking\n";
    os << "# n_times=" << traj.size() << "\n";
    os << "t";
    for (int k = 0; k < n; ++k) os << ",re_" << k << ",im_" << k;
    os << "\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Matrix& m = traj.map(i).matrix();
        os << format_number(traj.time(i));
        for (int k = 0; k < n; ++k) {
            const Complex z = m.data()[k];
            os << ',' << format_number(z.real()) << ',' << format_number(z.imag());
        }
        os << "\n";
    }
}

dyn::MapTrajectory read_map_trajectory(std::istream& is)
{
    std::string line;
    int lineno = 0;
    int dim = 0;
    long n_times = -1;
    bool tagged = false, convention = false, header = false;
    std::vector<double> times;
    std::vector<Superoperator> maps;

    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = trim(t.substr(1));
            if (body == "tpflux-map-trajectory v1") {
                tagged = true;
            } else if (body.rfind("dim=", 0) == 0) {
                dim = std::stoi(body.substr(4));
                if (dim < 1) fail(lineno, "dim must be positive");
            } else if (body.rfind("convention=", 0) == 0) {
                if (body.substr(11) != "column-stacking") fail(lineno, "unsupported convention '" + body.substr(11) + "'");
                convention = true;
            } else if (body.rfind("n_times=", 0) == 0) {
                n_times = std::stol(body.substr(8));
            }
            continue;
        }
        if (!tagged) fail(lineno, "missing format tag '# tpflux-map-trajectory v1'");
        if (dim == 0) fail(lineno, "missing '# dim=' header");
        if (!convention) fail(lineno, "missing '# convention=' header");
        if (!header) {
            if (t.rfind("t,", 0) != 0) fail(lineno, "expected column header starting with 't,'");
            header = true;
            continue;
        }
        const int n = dim * dim * dim * dim;
        std::vector<double> vals;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
                if (trim(cell.substr(used)).size() != 0) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail(lineno, "cannot parse number '" + cell + "'");
            }
        }
        if (static_cast<int>(vals.size()) != 1 + 2 * n) {
            std::ostringstream msg;
            msg << "expected " << 1 + 2 * n << " columns, found " << vals.size();
            fail(lineno, msg.str());
        }
        times.push_back(vals[0]);
        Matrix m(dim * dim, dim * dim);
        for (int k = 0; k < n; ++k) m.data()[k] = Complex(vals[1 + 2 * k], vals[2 + 2 * k]);
        try {
            maps.emplace_back(dim, m);
        } catch (const std::exception& e) {
            fail(lineno, e.what());
        }
    }
    if (maps.empty()) throw std::runtime_error("map file contains no data rows");
    if (n_times >= 0 && static_cast<std::size_t>(n_times) != maps.size()) {
        std::ostringstream msg;
        msg << "header announces " << n_times << " times but file has " << maps.size();
        throw std::runtime_error(msg.str());
    }
    const UniformGrid grid = UniformGrid::from_times(times);
    return dyn::MapTrajectory(grid, std::move(maps));
}

dyn::MapTrajectory read_map_trajectory_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
    return read_map_trajectory(in);
}

void write_observable_series(std::ostream& os, const thermo::ObservableSeries& series)
{
    if (series.ops.empty()) return;
    const int d = series.ops.front().dim();
    os << "t";
    for (int k = 0; k < d; ++k) os << ",eig_" << k;
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) os << ",re_" << r << '_' << c << ",im_" << r << '_' << c;
    }
    os << "\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto eig = eig_hermitian(series.ops[i]);
        os << format_number(series.times[i]);
        for (int k = 0; k < d; ++k) os << ',' << format_number(eig.values(k));
        const Matrix& m = series.ops[i].matrix();
        for (int c = 0; c < d; ++c) {
            for (int r = 0; r < d; ++r) os << ',' << format_number(m(r, c).real()) << ',' << format_number(m(r, c).imag());
        }
        os << "\n";
    }
}

} // namespace tpf::io
