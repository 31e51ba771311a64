#pragma once

#include <stdexcept>
#include <string>

namespace potlp {

enum class errc {
  syntax,               // malformed task expression
  negation_on_compound, // '!' applied to a non-atomic subterm
  unknown_proposition,  // identifier not present in the alphabet
  state_explosion,      // automaton grew past the configured bound
  param,                // bad argument to a library call or generator
  immediate_violation,  // start cell already drives the automaton dead
  no_such_transition,   // queried automaton edge has an empty guard
  no_self_loop,         // source state cannot idle on any letter
  degenerate_data,      // training set lacks one outcome class
  instance_too_large,   // exhaustive evaluation bound exceeded
  no_action,            // selector called with an empty action set
  config,               // bad run configuration
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace potlp
