#pragma once

#include <map>
#include <string>
#include <vector>

#include "hpn/net.hpp"
#include "hpn/registry.hpp"

namespace hpn::gen {

/// Source fragment spliced into the generated controller for one binding
/// key. Bodies are verbatim statement text for the stub function.
struct Fragment {
    std::string body;
    bool is_condition = false;
    OpAffinity affinity = OpAffinity::any;
    std::string subsystem;
};

class FragmentStore {
public:
    void add(const std::string& key, Fragment fragment) { fragments_[key] = std::move(fragment); }
    const Fragment* find(const std::string& key) const
    {
        auto it = fragments_.find(key);
        return it == fragments_.end() ? nullptr : &it->second;
    }
    const std::map<std::string, Fragment>& all() const { return fragments_; }

private:
    std::map<std::string, Fragment> fragments_;
};

/// Fragments for the built-in line-follower bindings: call-throughs into
/// the library bodies, so generated controllers behave identically.
FragmentStore line_follower_fragments();

/// Per-element source templates. Slots use @name@ markers; every element
/// kind emits a fixed number of lines, which keeps the generated size an
/// exact affine function of the element counts.
struct EmissionPlan {
    std::string net_line;
    std::string place_line;
    std::string transition_line;
    std::string page_line;
    std::string arc_line;
    std::string fusion_line;
    std::string marking_line;
    std::string main_header; // multi-line block above the construction body
    std::string main_footer; // entry point: flags, flatten, executor run
    std::string fragments_header;
    std::string op_stub;  // multi-line, @fn@ and @body@
    std::string cond_stub;
    std::string op_reg_line;
    std::string cond_reg_line;
    std::string cmake_file;

    static EmissionPlan defaults();
};

struct SourceTree {
    std::map<std::string, std::string> files; // filename -> content

    std::size_t total_lines() const; // manifest excluded
    void write(const std::string& directory) const;
};

/// Emits a standalone controller: net construction code, initial marking,
/// spliced binding stubs and a main that flattens the hierarchy and runs
/// the executor. Output is deterministic.
SourceTree generate(const System& sys, const EmissionPlan& plan, const FragmentStore& fragments);

/// Measured per-element line costs with the least-squares fit residuals.
struct SizeProfile {
    double constant = 0;
    double per_place = 0;
    double per_transition = 0;
    double per_arc = 0;
    double per_page = 0;
    std::vector<double> residuals;
    double max_residual = 0;
};

SizeProfile measure_size(const std::vector<const System*>& corpus, const EmissionPlan& plan,
                         const FragmentStore& fragments);

std::string format_profile(const SizeProfile& profile);

/// Deterministic corpus of binding-free hierarchical nets with independently
/// varied element counts, used to measure the emission profile.
std::vector<System> sample_corpus(std::size_t count, std::uint64_t seed = 0);

} // namespace hpn::gen
