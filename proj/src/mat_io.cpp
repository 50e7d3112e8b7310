#include "ghostsim/mat_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ghostsim/errors.hpp"

namespace ghostsim {

void write_ghostmat(std::ostream& os, const CMatrix& m) {
    os << "GHOSTMAT v1 " << m.rows() << ' ' << m.cols() << " complex\n";
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", m(i, j).real(), m(i, j).imag());
            os << buf;
        }
    if (!os)
        throw IoError("failed to write GHOSTMAT stream");
}

void write_ghostmat_file(const std::string& path, const CMatrix& m) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open " + path + " for writing");
    write_ghostmat(f, m);
}

CMatrix read_ghostmat(std::istream& is) {
    std::string magic, version, kind;
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> magic >> version >> rows >> cols >> kind) || magic != "GHOSTMAT" ||
        version != "v1" || kind != "complex" || rows < 0 || cols < 0)
        throw IoError("not a GHOSTMAT v1 complex matrix");
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            double re = 0.0, im = 0.0;
            if (!(is >> re >> im))
                throw IoError("GHOSTMAT payload is truncated");
            m(i, j) = Complex(re, im);
        }
    return m;
}

CMatrix read_ghostmat_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open " + path);
    return read_ghostmat(f);
}

} // namespace ghostsim
