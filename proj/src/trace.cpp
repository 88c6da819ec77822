#include "distqp/trace.hpp"

#include <cstdio>
#include <ostream>

namespace distqp {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::StepCriterion: return "step_criterion";
    case Termination::GapCriterion: return "gap_criterion";
    case Termination::MaxIters: return "max_iters";
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const SolveReport& report,
                     const std::string& extra_meta) {
  os << "# schema=trace.v1 solver=" << report.solver
     << " termination=" << termination_name(report.termination);
  if (!extra_meta.empty()) os << ' ' << extra_meta;
  os << '\n';
  os << "iter,j0,j_model,dual_obj,gap,cg_iters,step_norm,aux_norm,wall_ns\n";
  for (const TraceRow& r : report.trace) {
    os << r.iter << ',' << format_double(r.j0) << ',' << format_double(r.j_model)
       << ',' << format_double(r.dual_obj) << ',' << format_double(r.gap) << ','
       << r.cg_iters << ',' << format_double(r.step_norm) << ','
       << format_double(r.aux_norm) << ',' << r.wall_ns << '\n';
  }
}

}  // namespace distqp
