#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "memocheck/memocheck.hpp"

namespace testutil {

using namespace memocheck;

// Builds a heap term from text. Variables with the same name share a node,
// also across calls that pass the same `vars` and `names`.
inline NodeId term(Store& s, std::string_view text, std::vector<NodeId>* vars = nullptr,
                   std::vector<std::string>* names = nullptr) {
  std::vector<std::string> local_names;
  SourceTerm t = parse_term(text, s.symbols(), &local_names);
  std::vector<NodeId> local_vars;
  std::vector<std::string> scratch;
  std::vector<NodeId>& shared = vars ? *vars : local_vars;
  std::vector<std::string>& shared_names = names ? *names : scratch;
  shared_names.resize(shared.size());
  std::vector<NodeId> varmap(local_names.size(), kNoNode);
  for (std::size_t i = 0; i < local_names.size(); ++i) {
    const std::string& n = local_names[i];
    auto it = n.empty() || n[0] == '_' ? shared_names.end() : std::find(shared_names.begin(), shared_names.end(), n);
    if (it != shared_names.end()) {
      varmap[i] = shared[static_cast<std::size_t>(it - shared_names.begin())];
    } else {
      varmap[i] = s.new_var();
      shared.push_back(varmap[i]);
      shared_names.push_back(n);
    }
  }
  return s.copy_in(t, varmap);
}

inline std::string read_sample(const std::string& name) {
  std::ifstream in(std::string(MEMOCHECK_SAMPLES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const char* kBintree = R"PL(
:- regtype bintree/2.
bintree(empty, _).
bintree(tree(L,X,R), T) :- bintree(L, T), call(T, X), bintree(R, T).
)PL";

inline const char* kList = R"PL(
:- regtype list/2.
list([], _).
list([X|Xs], T) :- call(T, X), list(Xs, T).
)PL";

}  // namespace testutil
