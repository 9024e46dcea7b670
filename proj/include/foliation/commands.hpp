#pragma once

#include "foliation/run_config.hpp"

namespace foliation {

/// Command entry points. Each resolves the configuration, runs the
/// computation, writes its output files into the resolved output directory
/// (CSV data plus manifest.json with every config field and the library
/// version), and returns the process exit code:
///
///   0  success
///   1  gap condition unsatisfied (gap command only; validation errors are
///      thrown as ConfigError/DomainError and mapped to 1 by the front end)
///   2  a fixed-point computation hit its iteration cap (files are still
///      written; the manifest records which samples failed)
int cmd_leaf(const RunConfig& config);
int cmd_converge(const RunConfig& config);
int cmd_mc(const RunConfig& config);
int cmd_gap(const RunConfig& config);
int cmd_membership(const RunConfig& config);

}  // namespace foliation
