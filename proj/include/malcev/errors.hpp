#pragma once

#include <stdexcept>
#include <string>

namespace malcev {

enum class errc {
  malformed_document,
  entry_out_of_range,
  table_length_mismatch,
  unknown_operation,
  arity_mismatch,
  not_a_congruence,
  not_in_lattice,
  interval_invalid,
  not_transposed,
  witness_inconsistent,
  centralizer_inconsistent,
  not_abelian,
  axiom_failure,
  clone_incomplete,
  precondition_failed,
  not_elementary_abelian,
  scalar_action_failed,
  mod_mu_violation,
  not_a_loop,
  inconsistency_detected,
  internal_error,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::malformed_document: return "MalformedDocument";
    case errc::entry_out_of_range: return "EntryOutOfRange";
    case errc::table_length_mismatch: return "TableLengthMismatch";
    case errc::unknown_operation: return "UnknownOperation";
    case errc::arity_mismatch: return "ArityMismatch";
    case errc::not_a_congruence: return "NotACongruence";
    case errc::not_in_lattice: return "NotInLattice";
    case errc::interval_invalid: return "IntervalInvalid";
    case errc::not_transposed: return "NotTransposed";
    case errc::witness_inconsistent: return "WitnessInconsistent";
    case errc::centralizer_inconsistent: return "CentralizerInconsistent";
    case errc::not_abelian: return "NotAbelian";
    case errc::axiom_failure: return "AxiomFailure";
    case errc::clone_incomplete: return "CloneIncomplete";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::not_elementary_abelian: return "NotElementaryAbelian";
    case errc::scalar_action_failed: return "ScalarActionFailed";
    case errc::mod_mu_violation: return "ModMuViolation";
    case errc::not_a_loop: return "NotALoop";
    case errc::inconsistency_detected: return "InconsistencyDetected";
    case errc::internal_error: return "InternalError";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void check(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace malcev
