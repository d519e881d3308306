#pragma once

#include "refsol/corpus.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace refsol {

struct ExecutionResult {
    static constexpr int kNoStatus = -1;

    std::string stdout_data;
    int exit_status = kNoStatus;  // kNoStatus when timed out or killed by a signal
    std::int64_t elapsed_ms = 0;
    bool timed_out = false;
};

class InterpreterMissing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SpawnFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `REFSOL_INTERPRETER`, or `python3` when unset.
std::string interpreter_name();

/// Runs `source` with the interpreter in a child process, feeding `input`
/// on stdin. Stderr is discarded. The child is killed after `timeout_ms`.
/// Not a sandbox: only run trusted code.
ExecutionResult run_program(std::string_view source, std::string_view input, std::int64_t timeout_ms);

struct EquivalenceVerdict {
    enum class Kind { Equivalent, Divergent, Inconclusive };

    Kind kind = Kind::Inconclusive;
    std::size_t sample_index = 0;  // first mismatch for Divergent
    std::string reason;            // for Inconclusive

    std::string to_string() const;
};

/// Compares stdout of both programs on every sample, CRLF folded to LF.
EquivalenceVerdict check_equivalence(const Submission& original, std::string_view transformed,
                                     std::span<const IoSample> samples, std::int64_t timeout_ms);

}  // namespace refsol
