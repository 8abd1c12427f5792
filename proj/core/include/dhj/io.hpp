#pragma once

#include <string>
#include <vector>

#include "dhj/grid_field.hpp"
#include "dhj/pde_evolver.hpp"
#include "dhj/phase_flow.hpp"
#include "dhj/problem.hpp"

namespace dhj {

// 17-significant-digit decimal, locale-independent (round-trips doubles).
std::string format_double(double v);

// Minimal deterministic JSON emitter: insertion order preserved, doubles
// via format_double, so identical inputs serialize byte-identically.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& s);
  JsonWriter& value(const char* s);
  JsonWriter& value(const Vec& v);
  JsonWriter& null();

  const std::string& str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> need_comma_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Field dump: header q_1[,q_2],u,du_1[,du_2], one row per node in row-major
// order, 17 significant digits. du columns hold the centered gradient.
void write_field_csv(const std::string& path, const GridField& u);

// Reads a dump written by write_field_csv back onto the problem's torus;
// grid extents are inferred from the coordinate columns. interp sets the
// interpolation mode of the returned field.
GridField read_field_csv(const std::string& path, const TorusDomain& domain,
                         InterpKind interp = InterpKind::Cubic);

// header t,value_error,grad_error
void write_trace_csv(const std::string& path, const ConvergenceTrace& trace);

// header t,q_1[,q_2],p_1[,p_2],deviation
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<double>& deviations);

}  // namespace dhj
