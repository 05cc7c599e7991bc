#pragma once

// Execution counters. The counters mirror the quantities a pull pipeline
// can be profiled by: stream reads, recursive head selections of the
// holistic join, stack pushes/pops, and the peak population of all
// dynamic join structures (mu counts data nodes, a buffered k-ary tuple
// adds k; list_peak counts buffered entries).

#include <cstdint>
#include <string>

namespace tpq {

struct ExecStats {
  std::uint64_t advances = 0;
  std::uint64_t getnext_calls = 0;
  std::uint64_t stack_ops = 0;
  std::uint64_t list_peak = 0;
  std::uint64_t mu = 0;
  std::uint64_t result_rows = 0;
  std::uint64_t wall_ns = 0;
  double sigma = 0.0;
  double rho = 0.0;
};

// Live counters threaded through every operator of one execution.
class StatsContext {
 public:
  ExecStats stats;
  bool debug_asserts = false;

  void on_advance() { ++stats.advances; }
  void on_getnext() { ++stats.getnext_calls; }

  // Stack entry holding `nodes` data nodes enters / leaves a stack.
  void on_push(std::uint64_t nodes) {
    ++stats.stack_ops;
    add_nodes(nodes);
  }
  void on_pop(std::uint64_t nodes) {
    ++stats.stack_ops;
    remove_nodes(nodes);
  }

  // Self-/inherited-/pending-list bookkeeping. Transfers between lists
  // keep the combined population constant, so only entry and exit count.
  void on_list_add(std::uint64_t entries, std::uint64_t nodes) {
    list_entries_ += entries;
    if (list_entries_ > stats.list_peak) stats.list_peak = list_entries_;
    add_nodes(nodes);
  }
  void on_list_remove(std::uint64_t entries, std::uint64_t nodes) {
    list_entries_ -= entries;
    remove_nodes(nodes);
  }

  // Holistic path-solution buffers count toward mu only.
  void on_buffer_add(std::uint64_t nodes) { add_nodes(nodes); }

  std::uint64_t live_nodes() const { return cur_nodes_; }
  std::uint64_t live_list_entries() const { return list_entries_; }

 private:
  void add_nodes(std::uint64_t nodes) {
    cur_nodes_ += nodes;
    if (cur_nodes_ > stats.mu) stats.mu = cur_nodes_;
  }
  void remove_nodes(std::uint64_t nodes) { cur_nodes_ -= nodes; }

  std::uint64_t cur_nodes_ = 0;
  std::uint64_t list_entries_ = 0;
};

inline std::string stats_csv_header() {
  return "query_id,engine,wall_ns,advances,getnext_calls,stack_ops,"
         "list_peak,mu,result_rows,sigma,rho";
}

}  // namespace tpq
