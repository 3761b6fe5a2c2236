#include "nstorus/norm_series.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nstorus {

void NormSeries::validate() const {
  const std::size_t n = times.size();
  if (l2.size() != n || h1.size() != n || enstrophy.size() != n || div_linf.size() != n)
    throw std::invalid_argument("norm series columns have different lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("norm series times are not strictly increasing");
    if (l2[i] < 0 || h1[i] < 0 || enstrophy[i] < 0 || div_linf[i] < 0)
      throw std::invalid_argument("norm series holds a negative norm");
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const NormSeries& series) {
  out << "t,l2,h1,enstrophy,div_linf\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(series.times[i]) << ',' << format_double(series.l2[i]) << ','
        << format_double(series.h1[i]) << ',' << format_double(series.enstrophy[i]) << ','
        << format_double(series.div_linf[i]) << '\n';
  }
}

NormSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,l2,h1,enstrophy,div_linf")
    throw std::runtime_error("norm series CSV: missing or malformed header");
  NormSeries series;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    double v[5];
    std::string cell;
    for (int c = 0; c < 5; ++c) {
      if (!std::getline(fields, cell, ','))
        throw std::runtime_error("norm series CSV: short row " + std::to_string(row));
      v[c] = std::stod(cell);
    }
    series.push(v[0], v[1], v[2], v[3], v[4]);
  }
  return series;
}

}  // namespace nstorus
