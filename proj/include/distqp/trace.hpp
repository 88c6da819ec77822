#pragma once

#include "distqp/linear_map.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace distqp {

enum class Termination { StepCriterion, GapCriterion, MaxIters };

const char* termination_name(Termination t);

/// One per-iteration record.  j_model is J(x,eps) for IRWA and
/// J_hat(x,p) for ADAL; aux_norm is ||eps|| for IRWA and E_k for ADAL.
/// dual_obj/gap are NaN when the dual is unavailable (singular H).
struct TraceRow {
  Index iter = 0;
  double j0 = 0.0;
  double j_model = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  Index cg_iters = 0;
  double step_norm = 0.0;
  double aux_norm = 0.0;
  std::int64_t wall_ns = 0;
};

struct SolveReport {
  std::string solver;
  Termination termination = Termination::MaxIters;
  bool converged = false;
  Index iterations = 0;
  Index cumulative_cg = 0;
  bool cg_unconverged_any = false;
  double final_j0 = 0.0;
  double final_j_model = 0.0;
  double final_dual = 0.0;
  double final_gap = 0.0;
  Vec x;
  std::vector<TraceRow> trace;
};

/// Trace CSV, schema "trace.v1": one comment line of key=value metadata,
/// a header row, then one row per iteration.  Floats carry 17 significant
/// digits so values round-trip exactly.
void write_trace_csv(std::ostream& os, const SolveReport& report,
                     const std::string& extra_meta = "");

std::string format_double(double v);

}  // namespace distqp
