#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hetune/errors.hpp"
#include "hetune/seeker.hpp"

namespace hetune::seeker {

namespace {

constexpr const char* kHeader =
    "k,h1,h2,h3,h4,Kp,Ki,Kd,Tf,Jplus,Jminus,dTheta1,dTheta2,dTheta3,dTheta4";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const TuningTrace& trace) {
  out << kHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.k;
    for (int h : r.mask.h) out << ',' << h;
    for (double v : r.theta.as_array()) out << ',' << fmt(v);
    out << ',' << fmt(r.j_plus) << ',' << fmt(r.j_minus);
    for (double v : r.dtheta) out << ',' << fmt(v);
    out << '\n';
  }
}

std::vector<IterationRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw FormatError("trace CSV: unexpected header");
  }
  std::vector<IterationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 15) throw FormatError("trace CSV: expected 15 columns");
    try {
      IterationRecord r;
      r.k = std::stoi(cells[0]);
      for (int i = 0; i < 4; ++i) {
        const int h = std::stoi(cells[1 + i]);
        if (h != 1 && h != -1) throw FormatError("trace CSV: mask entry not +-1");
        r.mask.h[i] = h;
      }
      Vec4 theta{};
      for (int i = 0; i < 4; ++i) theta[i] = std::stod(cells[5 + i]);
      r.theta = Theta::from_array(theta);
      r.j_plus = std::stod(cells[9]);
      r.j_minus = std::stod(cells[10]);
      for (int i = 0; i < 4; ++i) r.dtheta[i] = std::stod(cells[11 + i]);
      records.push_back(r);
    } catch (const std::logic_error&) {
      throw FormatError("trace CSV: malformed number in line '" + line + "'");
    }
  }
  return records;
}

}  // namespace hetune::seeker
