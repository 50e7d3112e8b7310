#ifndef GHOSTSIM_MAT_IO_HPP
#define GHOSTSIM_MAT_IO_HPP

#include <iosfwd>
#include <string>

#include "ghostsim/linalg.hpp"

namespace ghostsim {

/// GHOSTMAT v1: a bit-stable ASCII complex-matrix format.
/// Header line `GHOSTMAT v1 <rows> <cols> complex`, then rows*cols lines of
/// `re im` pairs in row-major order, 17 significant digits (doubles
/// round-trip exactly).
void write_ghostmat(std::ostream& os, const CMatrix& m);
void write_ghostmat_file(const std::string& path, const CMatrix& m);

CMatrix read_ghostmat(std::istream& is);
CMatrix read_ghostmat_file(const std::string& path);

} // namespace ghostsim

#endif // GHOSTSIM_MAT_IO_HPP
