#include "dyncon/abc_graph.hpp"

#include <algorithm>

namespace dyncon {

OpSet vertices(const DependencyGraph& c) {
  OpSet out;
  for (const auto& [op, sources] : c) {
    out.insert(op);
    out.insert(sources.begin(), sources.end());
  }
  return out;
}

BValue AbcView::b_value(const OpInstance& op) const {
  auto it = B.find(op);
  return it == B.end() ? BValue::infinity() : BValue(it->second);
}

OpSet AbcView::booked() const {
  OpSet out;
  for (const auto& [op, b] : B) out.insert(op);
  return out;
}

AbcView merge_components(const std::vector<AbcLocal>& components) {
  AbcView view;
  for (const auto& local : components) {
    view.A.insert(local.announced.begin(), local.announced.end());
    for (const auto& [op, b] : local.booked) {
      auto [it, fresh] = view.B.emplace(op, b);
      if (!fresh) it->second = std::min(it->second, b);
    }
    for (const auto& [op, deps] : local.committed) view.C[op].insert(deps.begin(), deps.end());
  }
  return view;
}

AbcGraph::AbcGraph(std::size_t n_processes, std::string object_id)
    : locals_(n_processes), snapshot_(std::move(object_id), n_processes) {}

void AbcGraph::add_A(ProcessId p, const OpInstance& op, StepObserver* obs) {
  auto& local = locals_.at(static_cast<std::size_t>(p));
  local.announced.insert(op);
  snapshot_.write(p, p, local);
  if (obs) obs->on_step({p, object_id(), "write_A", to_json(local, 'A')});
}

void AbcGraph::add_B(ProcessId p, const OpInstance& op, int b, StepObserver* obs) {
  auto& local = locals_.at(static_cast<std::size_t>(p));
  local.booked.emplace(op, b);
  snapshot_.write(p, p, local);
  if (obs) obs->on_step({p, object_id(), "write_B", to_json(local, 'B')});
}

void AbcGraph::add_C(ProcessId p, const OpInstance& op, const OpSet& deps, StepObserver* obs) {
  auto& local = locals_.at(static_cast<std::size_t>(p));
  local.committed.emplace(op, deps);
  snapshot_.write(p, p, local);
  if (obs) obs->on_step({p, object_id(), "write_C", to_json(local, 'C')});
}

AbcView AbcGraph::read(ProcessId p, StepObserver* obs) const {
  auto view = merge_components(snapshot_.scan());
  if (obs) obs->on_step({p, object_id(), "scan", to_json(view)});
  return view;
}

namespace {

Value id_list(const OpSet& ops) {
  Value out = Value::array();
  for (const auto& op : ops) out.push_back(op.id.str());
  return out;
}

}  // namespace

Value to_json(const AbcView& view) {
  Value b = Value::object();
  for (const auto& op : view.A) b[op.id.str()] = nullptr;
  for (const auto& [op, v] : view.B) b[op.id.str()] = v;
  Value c = Value::object();
  for (const auto& [op, sources] : view.C) c[op.id.str()] = id_list(sources);
  return Value{{"A", id_list(view.A)}, {"B", std::move(b)}, {"C", std::move(c)}};
}

Value to_json(const AbcLocal& local, char component) {
  Value out = Value::array();
  switch (component) {
    case 'A':
      return id_list(local.announced);
    case 'B':
      for (const auto& [op, b] : local.booked) out.push_back(Value::array({op.id.str(), b}));
      return out;
    default:
      for (const auto& [op, deps] : local.committed) out.push_back(Value::array({op.id.str(), id_list(deps)}));
      return out;
  }
}

}  // namespace dyncon
