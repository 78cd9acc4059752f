#include "p2plab/engine.hpp"

namespace p2plab {

Event next_event(const NetworkState& state, Rng& rng) {
  const ScenarioConfig& cfg = state.config();
  const double active = static_cast<double>(state.population());
  const double total = cfg.lambda + cfg.us + cfg.mu * active;
  const double t = state.t() + rng.exponential(total);
  const double u = rng.uniform01() * total;
  if (u < cfg.lambda) return {Event::Kind::arrival, t, 0};
  if (u < cfg.lambda + cfg.us) return {Event::Kind::seed_contact, t, 0};
  const auto idx = static_cast<std::size_t>(rng.uniform_int(state.population()));
  return {Event::Kind::peer_contact, t, state.peer_at(idx).id};
}

namespace {

PolicyOutcome seed_policy(NetworkState& state, const ArrivalLedger& ledger, Rng& rng) {
  switch (state.config().protocol) {
    case Protocol::gs:
      return gs_seed_contact(state, rng);
    case Protocol::dgs:
      return dgs_seed_contact(state, ledger, rng);
    default:
      return unstructured_seed_contact(state, rng);
  }
}

PolicyOutcome peer_policy(NetworkState& state, std::size_t actor_idx, Rng& rng) {
  switch (state.config().protocol) {
    case Protocol::gs:
      return gs_contact(state, actor_idx, rng);
    case Protocol::dgs:
      return dgs_contact(state, actor_idx, rng);
    case Protocol::ff:
      return ff_pull(state, actor_idx, rng);
    case Protocol::cc:
      return cc_pull(state, actor_idx, state.config().m, rng);
    default:
      return unstructured_contact(state, actor_idx, rng);
  }
}

void apply_outcome(NetworkState& state, const PolicyOutcome& outcome, double t, Rng& rng,
                   RunResult* result) {
  if (!outcome.transfer) return;
  const Transfer& tr = *outcome.transfer;
  if (!state.grant_piece(tr.to, tr.piece)) return;
  if (state.config().protocol == Protocol::waiting) {
    state.schedule_dwell(tr.to, t + rng.exponential(state.config().mu));
    return;
  }
  const auto gone = state.remove_peer(tr.to);
  if (result) result->sojourns.push_back({gone.id, gone.arrived_at, t});
}

}  // namespace

std::optional<PolicyOutcome> dispatch(NetworkState& state, const Event& event,
                                      ArrivalLedger& ledger, Rng& rng, RunResult* result) {
  state.advance_to(event.t);
  switch (event.kind) {
    case Event::Kind::arrival: {
      ledger.push(state.add_arrival());
      return std::nullopt;
    }
    case Event::Kind::seed_contact: {
      PolicyOutcome out = seed_policy(state, ledger, rng);
      apply_outcome(state, out, event.t, rng, result);
      return out;
    }
    case Event::Kind::peer_contact: {
      PolicyOutcome out = peer_policy(state, state.index_of(event.actor), rng);
      apply_outcome(state, out, event.t, rng, result);
      return out;
    }
  }
  return std::nullopt;
}

RunResult run_scenario(const ScenarioConfig& cfg, std::uint64_t stream,
                       const EarlyStop* early_stop) {
  cfg.validate();
  NetworkState state(cfg);
  Rng rng(cfg.rng_seed, stream);
  ArrivalLedger ledger;
  RunResult result;
  result.rng_seed = cfg.rng_seed;
  result.stream = stream;

  std::uint64_t sample_idx = 0;
  auto emit_until = [&](double t_limit) {
    for (;;) {
      const double ts = static_cast<double>(sample_idx) * cfg.sample_dt;
      if (ts > cfg.horizon || ts > t_limit) return;
      result.samples.push_back(snapshot(state, ts));
      ++sample_idx;
    }
  };

  std::size_t post_warmup = 0;
  auto count_departure = [&](double t_depart) {
    return early_stop && t_depart >= early_stop->warmup &&
           ++post_warmup >= early_stop->sojourn_count;
  };

  const bool waiting = cfg.protocol == Protocol::waiting;
  for (;;) {
    const Event ev = next_event(state, rng);

    if (waiting) {
      // A dwell deadline ahead of the tentative event fires first; the
      // remaining exponential clocks are memoryless, so redrawing is exact.
      const auto dwell = state.next_dwell();
      if (dwell && dwell->first <= ev.t && dwell->first <= cfg.horizon) {
        emit_until(dwell->first);
        state.advance_to(dwell->first);
        state.pop_dwell();
        const auto gone = state.remove_peer(dwell->second);
        result.sojourns.push_back({gone.id, gone.arrived_at, dwell->first});
        if (count_departure(dwell->first)) break;
        continue;
      }
    }

    if (ev.t > cfg.horizon) {
      emit_until(cfg.horizon);
      state.advance_to(cfg.horizon);
      break;
    }
    emit_until(ev.t);
    const std::size_t sojourns_before = result.sojourns.size();
    dispatch(state, ev, ledger, rng, &result);
    if (result.sojourns.size() > sojourns_before &&
        count_departure(result.sojourns.back().t_depart))
      break;
    if (state.population() > cfg.population_cap) {
      result.explosion = true;
      break;
    }
  }
  return result;
}

}  // namespace p2plab
