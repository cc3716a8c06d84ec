#include "psidolab/report.hpp"

#include <cstdio>
#include <fstream>

namespace psidolab::report {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

std::string sweep_csv(const experiments::SweepReport& rep) {
    std::string out = "param,p,q,norm_lb,method,iterations,converged,seed\n";
    for (const auto& pt : rep.points) {
        out += format_double(pt.param) + "," + format_double(pt.estimate.p) + "," +
               format_double(pt.estimate.q) + "," + format_double(pt.estimate.value) + "," +
               pt.estimate.method + "," + std::to_string(pt.estimate.iterations) + "," +
               (pt.estimate.converged ? "1" : "0") + "," + std::to_string(pt.seed) + "\n";
    }
    return out;
}

std::string sweep_gnuplot(const experiments::SweepReport& rep) {
    std::string out = "# " + rep.swept + " norm_lb\n";
    for (const auto& pt : rep.points)
        out += format_double(pt.param) + " " + format_double(pt.estimate.value) + "\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot open " + path + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoFailure("write failed for " + path);
}

}  // namespace psidolab::report
