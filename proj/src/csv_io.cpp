#include "basislab/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "basislab/errors.hpp"

namespace basislab {

namespace {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_double(const std::string& field, std::size_t line_number) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
    throw IoError("csv read: line " + std::to_string(line_number) + ": bad number '" + field +
                  "'");
  }
  return value;
}

}  // namespace

void emit_csv(const CoefficientTrajectory& traj, const std::filesystem::path& path) {
  traj.validate();
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) {
      throw IoError("cannot open for writing: " + tmp.string());
    }
    os << "iter";
    for (const std::string& label : traj.labels) {
      os << ',' << label;
    }
    os << ",loss,error\n";
    for (std::size_t t = 0; t < traj.size(); ++t) {
      os << traj.steps[t];
      for (Eigen::Index i = 0; i < traj.coefficients[t].size(); ++i) {
        os << ',' << format_double(traj.coefficients[t](i));
      }
      os << ',' << format_double(traj.loss[t]) << ',' << format_double(traj.error[t]) << '\n';
    }
    os.flush();
    if (!os) {
      throw IoError("write failure: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

CoefficientTrajectory read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open for reading: " + path.string());
  }
  std::string line;
  if (!std::getline(is, line)) {
    throw IoError("csv read: empty file " + path.string());
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "iter" || header[header.size() - 2] != "loss" ||
      header.back() != "error") {
    throw IoError("csv read: line 1: expected header iter,<labels...>,loss,error");
  }
  CoefficientTrajectory traj;
  traj.labels.assign(header.begin() + 1, header.end() - 2);

  std::size_t line_number = 1;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IoError("csv read: line " + std::to_string(line_number) + ": expected " +
                    std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long step = std::strtoull(fields[0].c_str(), &end, 10);
    if (end == fields[0].c_str() || *end != '\0' || errno == ERANGE) {
      throw IoError("csv read: line " + std::to_string(line_number) + ": bad iteration '" +
                    fields[0] + "'");
    }
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(traj.labels.size()));
    for (std::size_t i = 0; i < traj.labels.size(); ++i) {
      coeffs(static_cast<Eigen::Index>(i)) = parse_double(fields[i + 1], line_number);
    }
    const double loss = parse_double(fields[fields.size() - 2], line_number);
    const double error = parse_double(fields.back(), line_number);
    try {
      traj.append(static_cast<std::size_t>(step), coeffs, loss, error);
    } catch (const InputError& e) {
      throw IoError("csv read: line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace basislab
