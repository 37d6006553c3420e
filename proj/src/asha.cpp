#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <queue>
#include <stdexcept>

#include "scim/tuning.hpp"

namespace scim {
namespace {

long ceil_div(long a, long b) { return (a + b - 1) / b; }

struct Job {
  double finish = 0.0;
  long sequence = 0;
  int worker = 0;
  int trial = 0;
  int rung = 0;
  double score = 0.0;
  bool operator>(const Job& o) const {
    return finish != o.finish ? finish > o.finish : sequence > o.sequence;
  }
};

class Scheduler {
 public:
  Scheduler(const TrialFactory& factory, const SearchSpace& space, const AshaOptions& options)
      : factory_(factory), space_(space), opt_(options), rng_(options.seed),
        results_(options.rungs.size()), promoted_(options.rungs.size()), running_at_(options.rungs.size()) {
    if (opt_.eta < 2) throw std::invalid_argument("asha: eta must be >= 2");
    if (opt_.rungs.empty()) throw std::invalid_argument("asha: empty rung ladder");
    for (std::size_t k = 1; k < opt_.rungs.size(); ++k) {
      if (opt_.rungs[k] <= opt_.rungs[k - 1]) throw std::invalid_argument("asha: rungs must increase strictly");
    }
    if (opt_.rungs.front() <= 0) throw std::invalid_argument("asha: rung budgets must be positive");
    if (opt_.workers < 1) throw std::invalid_argument("asha: workers must be >= 1");
    if (opt_.log_path) {
      log_.open(*opt_.log_path, std::ios::app);
      if (!log_) throw std::runtime_error("cannot open trial log " + opt_.log_path->string());
      if (log_.tellp() == 0) log_ << "trial,rung,budget,score,wall_seconds,params\n";
    }
  }

  AshaResult run() {
    std::priority_queue<Job, std::vector<Job>, std::greater<>> events;
    std::vector<bool> idle(static_cast<std::size_t>(opt_.workers), true);
    double now = 0.0;
    long sequence = 0;
    while (true) {
      for (int w = 0; w < opt_.workers; ++w) {
        if (!idle[w]) continue;
        auto job = next_job();
        if (!job) break;
        job->worker = w;
        job->sequence = sequence++;
        job->finish = now + execute(*job);
        idle[w] = false;
        events.push(*job);
      }
      if (events.empty()) break;
      now = events.top().finish;
      // All completions sharing a timestamp are recorded before any new decision.
      while (!events.empty() && events.top().finish == now) {
        const Job done = events.top();
        events.pop();
        complete(done);
        idle[done.worker] = true;
      }
    }
    return finish();
  }

 private:
  // Runs the trial up to the rung budget now; the result is delivered at job completion.
  double execute(Job& job) {
    auto& record = trials_[static_cast<std::size_t>(job.trial)];
    const double from = record.last_budget();
    const double to = opt_.rungs[static_cast<std::size_t>(job.rung)];
    const auto start = std::chrono::steady_clock::now();
    job.score = runs_[static_cast<std::size_t>(job.trial)]->advance_to(to);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.status = TrialStatus::Running;
    ++running_at_[static_cast<std::size_t>(job.rung)];
    if (log_) {
      log_ << record.id << ',' << job.rung << ',' << to << ',' << job.score << ',' << wall << ',';
      for (std::size_t d = 0; d < record.params.size(); ++d) log_ << (d ? ";" : "") << record.params[d];
      log_ << '\n';
    }
    return to - from;
  }

  void complete(const Job& job) {
    auto& record = trials_[static_cast<std::size_t>(job.trial)];
    record.record(opt_.rungs[static_cast<std::size_t>(job.rung)], job.score);
    record.status = TrialStatus::Paused;
    --running_at_[static_cast<std::size_t>(job.rung)];
    results_[static_cast<std::size_t>(job.rung)].emplace_back(job.score, job.trial);
  }

  // A rung is final once nothing more can ever arrive at it.
  std::vector<bool> final_flags() const {
    const std::size_t top = opt_.rungs.size();
    std::vector<bool> final_at(top, false);
    bool below_final = static_cast<int>(trials_.size()) >= opt_.max_trials;
    for (std::size_t k = 0; k < top; ++k) {
      final_at[k] = below_final && running_at_[k] == 0;
      if (k + 1 < top) {
        const long slots = ceil_div(static_cast<long>(results_[k].size()), opt_.eta);
        below_final = final_at[k] && (promoted_[k] >= slots || !has_candidate(k, slots));
      }
    }
    return final_at;
  }

  std::vector<std::pair<double, int>> ranked(std::size_t k) const {
    auto r = results_[k];
    std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    return r;
  }

  std::optional<int> candidate(std::size_t k, long slots) const {
    const auto r = ranked(k);
    for (long idx = 0; idx < slots && idx < static_cast<long>(r.size()); ++idx) {
      const int trial = r[static_cast<std::size_t>(idx)].second;
      if (!is_promoted_from(trial, k)) return trial;
    }
    return std::nullopt;
  }

  bool has_candidate(std::size_t k, long slots) const { return candidate(k, slots).has_value(); }

  bool is_promoted_from(int trial, std::size_t k) const {
    return static_cast<std::size_t>(trial_rung_.at(trial)) > k;
  }

  std::optional<Job> next_job() {
    const std::size_t top = opt_.rungs.size();
    const auto final_at = final_flags();
    for (std::size_t k = top - 1; k-- > 0;) {
      const long n = static_cast<long>(results_[k].size());
      const long slots = final_at[k] ? ceil_div(n, opt_.eta) : n / opt_.eta;
      if (promoted_[k] >= slots) continue;
      if (auto trial = candidate(k, slots)) {
        ++promoted_[k];
        trial_rung_[*trial] = static_cast<int>(k + 1);
        Job job;
        job.trial = *trial;
        job.rung = static_cast<int>(k + 1);
        return job;
      }
    }
    if (static_cast<int>(trials_.size()) < opt_.max_trials) {
      const int id = static_cast<int>(trials_.size());
      TrialRecord record;
      record.id = id;
      record.params = id < static_cast<int>(opt_.points.size()) ? opt_.points[static_cast<std::size_t>(id)]
                                                                : space_.sample(rng_);
      if (!space_.contains(record.params)) throw std::invalid_argument("asha: point outside the search space");
      runs_.push_back(factory_(record.params, id));
      trials_.push_back(std::move(record));
      trial_rung_[id] = 0;
      Job job;
      job.trial = id;
      job.rung = 0;
      return job;
    }
    return std::nullopt;
  }

  AshaResult finish() {
    AshaResult out;
    const std::size_t top = opt_.rungs.size();
    for (auto& t : trials_) {
      t.status = t.scores.size() == top ? TrialStatus::Complete : TrialStatus::Stopped;
    }
    for (std::size_t k = 0; k < top; ++k) {
      out.arrivals.push_back(static_cast<int>(results_[k].size()));
      out.promotions.push_back(static_cast<int>(promoted_[k]));
    }
    const auto last = ranked(top - 1);
    if (last.empty()) throw std::logic_error("asha: no trial reached the final rung");
    out.best = trials_[static_cast<std::size_t>(last.front().second)];
    out.trials = std::move(trials_);
    return out;
  }

  const TrialFactory& factory_;
  const SearchSpace& space_;
  AshaOptions opt_;
  Rng rng_;
  std::vector<TrialRecord> trials_;
  std::vector<std::unique_ptr<Trial>> runs_;
  std::map<int, int> trial_rung_;                         // highest rung each trial was sent to
  std::vector<std::vector<std::pair<double, int>>> results_;  // (score, trial) per rung
  std::vector<long> promoted_;
  std::vector<int> running_at_;
  std::ofstream log_;
};

}  // namespace

AshaResult asha_run(const TrialFactory& factory, const SearchSpace& space, const AshaOptions& options) {
  space.validate();
  if (options.max_trials < 1) throw std::invalid_argument("asha: max_trials must be >= 1");
  Scheduler scheduler(factory, space, options);
  return scheduler.run();
}

}  // namespace scim
