#include "sceneloop/agent/episode.hpp"

#include "sceneloop/backend/lenient.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <thread>

namespace sceneloop::agent {

using backend::ChatMessage;
using backend::ChatRequest;
using backend::Stream;
using memory::ContextMemory;
using memory::RoundRecord;
using tools::Phase;
using tools::ToolCall;
using tools::ToolResult;

void EpisodeConfig::validate() const {
    const std::pair<const char*, int> fields[] = {{"max_rounds", max_rounds},
                                                  {"window", window},
                                                  {"verifier_budget", verifier_budget},
                                                  {"best_of", best_of},
                                                  {"generator_turn_budget", generator_turn_budget},
                                                  {"jobs", jobs}};
    for (const auto& [name, v] : fields)
        if (v < 1) throw Error(fmt::format("{} must be positive (got {})", name, v));
    if (no_call_retries < 0) throw Error("no_call_retries must be non-negative");
    if (image_cap < 0) throw Error("image_cap must be non-negative");
}

EpisodeAborted::EpisodeAborted(Trajectory partial, std::exception_ptr cause, std::string message, bool engine_failure)
    : Error(std::move(message)), partial_(std::move(partial)), cause_(std::move(cause)), engine_failure_(engine_failure) {}

namespace {

constexpr const char* kNoCallReminder =
    "Your reply did not contain a tool call. Reply with exactly one tool call and a short explanation.";

struct Extracted {
    backend::ToolCallRequest call;
    std::string reasoning;
    std::size_t extra = 0;  // calls dropped beyond the first
};

std::optional<Extracted> extract_call(const ChatMessage& m, int& lenient_counter) {
    Extracted e;
    e.reasoning = m.text();
    if (!m.tool_calls.empty()) {
        e.call = m.tool_calls.front();
        e.extra = m.tool_calls.size() - 1;
        return e;
    }
    auto lenient = backend::parse_tool_call_lenient(e.reasoning);
    if (!lenient) return std::nullopt;
    e.call = {fmt::format("text_call_{}", lenient_counter++), lenient->name, lenient->arguments.dump()};
    e.reasoning = lenient->reasoning;
    return e;
}

// The assistant turn as kept in the running conversation: only the call that
// was acted on.
ChatMessage kept_turn(const Extracted& e) {
    ChatMessage m = ChatMessage::assistant(e.reasoning);
    m.tool_calls.push_back(e.call);
    return m;
}

ChatMessage tool_message(const Extracted& e, const ToolResult& r) {
    ChatMessage m;
    m.role = backend::Role::tool;
    m.tool_call_id = e.call.id;
    m.name = e.call.name;
    m.add_text(r.text);
    for (const auto& img : r.images) m.add_image(img);
    return m;
}

struct GeneratorOutcome {
    enum class Kind { submitted, failed, ended } kind = Kind::failed;
    tools::CodeSubmission submission;
    std::string failure_text;
};

class EpisodeRunner {
public:
    EpisodeRunner(const EpisodeTask& task, const EpisodeConfig& config, const EpisodeDeps& deps, int episode)
        : task_(task),
          cfg_(config),
          deps_(deps),
          memory_(config.window, config.image_cap),
          prompts_(deps.prompts ? *deps.prompts : memory::default_prompts()) {
        traj_.episode = episode;
        traj_.seed = config.seed + episode;
        traj_.task_id = task.id;
        embedder_ = deps.embedder ? deps.embedder : &fallback_;
    }

    Trajectory run() {
        const auto started = std::chrono::steady_clock::now();
        auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        };
        try {
            setup();
            loop();
        } catch (const backend::BackendError& e) {
            abort(std::current_exception(), fmt::format("backend failure: {}", e.what()), false, elapsed());
        } catch (const engine::EngineError& e) {
            abort(std::current_exception(), fmt::format("engine failure: {}", e.what()), true, elapsed());
        }
        if (deps_.writer) deps_.writer->write_summary(traj_, elapsed());
        return std::move(traj_);
    }

private:
    void log(const std::string& s) const {
        if (deps_.log) deps_.log(fmt::format("[episode {}] {}", traj_.episode, s));
    }

    [[noreturn]] void abort(std::exception_ptr cause, std::string message, bool engine_failure, double seconds) {
        if (memory_.has_open_round()) {
            auto r = memory_.discard_round();
            for (auto& e : r->events) traj_.trailing_events.push_back(std::move(e));
        }
        traj_.reason = TerminalReason::error;
        traj_.error = message;
        if (deps_.writer) deps_.writer->write_summary(traj_, seconds);
        throw EpisodeAborted(traj_, std::move(cause), std::move(message), engine_failure);
    }

    void setup() {
        std::string task_text = task_.instruction;
        if (task_.initial_program) {
            task_text += "\n\n[Initial program]\n" + *task_.initial_program;
            previous_source_ = *task_.initial_program;
        }
        memory_.pinned().task = std::move(task_text);
        memory_.pinned().targets = task_.targets;
        deps_.engine.reset();
        if (task_.initial_program) {
            const auto report = deps_.engine.execute_program(*task_.initial_program, cfg_.language);
            if (!report.ok())
                throw engine::EngineError(engine::EngineError::Kind::remote,
                                          fmt::format("initial program fails at line {}: {}", report.failure->line,
                                                      report.failure->message),
                                          engine::fault::exec_error, report.failure->detail);
        }
        traj_.final_program = previous_source_;
    }

    void loop() {
        for (int t = 0; t < cfg_.max_rounds; ++t) {
            RoundRecord& round = memory_.open_round();
            GeneratorOutcome g = generator_phase();
            if (g.kind == GeneratorOutcome::Kind::ended) {
                auto r = memory_.discard_round();
                for (auto& e : r->events) traj_.trailing_events.push_back(std::move(e));
                traj_.reason = TerminalReason::end_process;
                return;
            }
            if (g.kind == GeneratorOutcome::Kind::submitted) {
                const auto& s = g.submission;
                round.thought = s.thought;
                round.program = s.code;
                round.diff_text = s.diff_text;
                round.diff = s.diff;
                round.exec.success = s.success;
                round.exec.text = s.result.text;
                round.exec.error_line = s.error_line;
                round.exec.renders = s.result.images;
                previous_source_ = s.code;
                traj_.final_program = s.code;
            } else {
                round.exec.text = g.failure_text;
            }

            if (round.exec.success) {
                verifier_phase(round, *g.submission.camera);
            } else {
                round.feedback_substituted = true;
                round.feedback.visual_difference = "No render is available because this round did not produce one.";
                round.feedback.edit_suggestion =
                    "Address this before anything else, then resubmit the complete program:\n" + round.exec.text;
            }

            std::optional<metrics::MetricReport> m;
            if (round.exec.success && !task_.targets.empty())
                m = metrics::evaluate(round.exec.renders.front(), task_.targets, *embedder_);
            RoundRecord copy = round;
            memory_.commit_round();
            traj_.rounds.push_back(std::move(copy));
            traj_.round_metrics.push_back(m);
            if (deps_.writer) {
                deps_.writer->write_round(traj_.episode, traj_.rounds.back(), m);
                deps_.writer->write_summary(traj_, 0.0);
            }
            log(fmt::format("round {}: {}", t, round_status()));
        }
        traj_.reason = TerminalReason::budget_exhausted;
    }

    std::string round_status() const {
        const auto& r = traj_.rounds.back();
        if (!r.exec.success) return "failed";
        const auto& m = traj_.round_metrics.back();
        return m && m->pl ? fmt::format("ok, PL {:.3f}", *m->pl) : "ok";
    }

    GeneratorOutcome generator_phase() {
        GeneratorOutcome out;
        std::vector<ChatMessage> convo = memory::assemble_generator_context(memory_, prompts_);
        convo.push_back(ChatMessage::user(
            fmt::format("[Round {}] Continue the task. Submit the complete program with execute_code.",
                        memory_.current().index)));
        const json specs = tools::phase_schemas(Phase::generation);
        int reminders = 0;
        for (int turn = 0; turn < cfg_.generator_turn_budget; ++turn) {
            ChatMessage reply;
            try {
                reply = deps_.backend.chat(ChatRequest{Stream::generator, convo, specs});
            } catch (const backend::ScriptExhausted& e) {
                memory_.record_warning(Phase::generation, std::string("treated as end_process: ") + e.what());
                out.kind = GeneratorOutcome::Kind::ended;
                return out;
            }
            auto call = extract_call(reply, lenient_counter_);
            if (!call) {
                memory_.record_warning(Phase::generation, "reply without a tool call");
                if (reminders++ >= cfg_.no_call_retries) {
                    out.failure_text = fmt::format("No tool call after {} reminders; the round is counted as failed.",
                                                   cfg_.no_call_retries);
                    return out;
                }
                convo.push_back(reply);
                convo.push_back(ChatMessage::user(kNoCallReminder));
                continue;
            }
            if (call->extra > 0)
                memory_.record_warning(Phase::generation,
                                       fmt::format("dropped {} extra tool call(s) after '{}'", call->extra, call->call.name));

            ToolCall validated;
            ToolResult result;
            bool submitted = false;
            try {
                validated = tools::validate_tool_call(Phase::generation, call->call.name, json(call->call.arguments));
            } catch (const tools::SchemaError& e) {
                validated.name = call->call.name;
                validated.arguments = json::parse(call->call.arguments, nullptr, false);
                if (validated.arguments.is_discarded()) validated.arguments = call->call.arguments;
                result = ToolResult::failure(e.what());
            }
            validated.id = call->call.id;
            validated.reasoning = call->reasoning;

            if (!result.error) {
                const std::string& n = validated.name;
                if (n == "make_plan") {
                    result = tools::tool_make_plan(validated, memory_.pinned().plan);
                } else if (n == "get_scene_info") {
                    result = tools::tool_get_scene_info(deps_.engine);
                } else if (n == "get_better_object") {
                    result = tools::tool_get_better_object(validated, deps_.assets);
                } else if (n == "end_process") {
                    result = tools::tool_end_process(Phase::generation, validated);
                } else if (n == "execute_code") {
                    tools::ExecuteContext ctx{previous_source_, cfg_.language, cfg_.render};
                    out.submission = tools::tool_execute_code(validated, deps_.engine, ctx);
                    result = out.submission.result;
                    submitted = true;
                }
            }
            const bool planning_call = validated.name == "make_plan" || validated.name == "end_process";
            if (task_.kind == "reconstruct" && !memory_.pinned().plan && !plan_warned_ && !planning_call) {
                memory_.record_warning(Phase::generation, "make_plan should be the first call in a reconstruction task");
                plan_warned_ = true;
            }
            memory_.record_tool_event(Phase::generation, validated, result);
            if (result.control == tools::Control::end_generation) {
                out.kind = GeneratorOutcome::Kind::ended;
                return out;
            }
            if (submitted) {
                out.kind = GeneratorOutcome::Kind::submitted;
                return out;
            }
            convo.push_back(kept_turn(*call));
            convo.push_back(tool_message(*call, result));
        }
        out.failure_text = fmt::format("No execute_code call within {} generator turns; the round is counted as failed.",
                                       cfg_.generator_turn_budget);
        return out;
    }

    void verifier_phase(RoundRecord& round, const scene::CameraPose& start) {
        tools::VerifierSession session(deps_.engine, start, cfg_.verifier_budget, cfg_.render);
        std::vector<ChatMessage> convo = memory::assemble_verifier_context(memory_, round, prompts_);
        const json specs = tools::phase_schemas(Phase::verification);
        int reminders = 0;
        bool exhausted = false;

        for (int turn = 0; turn < cfg_.verifier_budget && !exhausted; ++turn) {
            ChatMessage reply;
            try {
                reply = deps_.backend.chat(ChatRequest{Stream::verifier, convo, specs});
            } catch (const backend::ScriptExhausted& e) {
                memory_.record_warning(Phase::verification, std::string("treated as end_process: ") + e.what());
                exhausted = true;
                break;
            }
            auto call = extract_call(reply, lenient_counter_);
            if (!call) {
                memory_.record_warning(Phase::verification, "reply without a tool call");
                if (reminders++ >= cfg_.no_call_retries) break;
                convo.push_back(reply);
                convo.push_back(ChatMessage::user(kNoCallReminder));
                continue;
            }
            if (call->extra > 0)
                memory_.record_warning(Phase::verification, fmt::format("dropped {} extra tool call(s) after '{}'",
                                                                        call->extra, call->call.name));
            ToolCall validated;
            ToolResult result;
            try {
                validated = tools::validate_tool_call(Phase::verification, call->call.name, json(call->call.arguments));
                result = session.dispatch(validated);
            } catch (const tools::SchemaError& e) {
                validated.name = call->call.name;
                validated.arguments = json::parse(call->call.arguments, nullptr, false);
                if (validated.arguments.is_discarded()) validated.arguments = call->call.arguments;
                result = ToolResult::failure(e.what());
            }
            validated.id = call->call.id;
            validated.reasoning = call->reasoning;
            memory_.record_tool_event(Phase::verification, validated, result);
            if (result.feedback) {
                round.feedback = *result.feedback;
                return;
            }
            convo.push_back(kept_turn(*call));
            convo.push_back(tool_message(*call, result));
        }

        if (!exhausted) {
            // Budget spent: one last turn that may only end the review.
            convo.push_back(ChatMessage::user("The inspection budget is used up. Call end_process now with your "
                                              "visual_difference and edit_suggestion."));
            try {
                ChatMessage reply = deps_.backend.chat(
                    ChatRequest{Stream::verifier, convo, tools::phase_schemas(Phase::verification, {"end_process"})});
                if (auto call = extract_call(reply, lenient_counter_); call && call->call.name == "end_process") {
                    ToolCall validated = tools::validate_tool_call(Phase::verification, "end_process",
                                                                   json(call->call.arguments));
                    validated.id = call->call.id;
                    validated.reasoning = call->reasoning;
                    ToolResult result = tools::tool_end_process(Phase::verification, validated);
                    memory_.record_tool_event(Phase::verification, validated, result);
                    round.feedback = *result.feedback;
                    return;
                }
                memory_.record_warning(Phase::verification, "forced final turn did not call end_process");
            } catch (const backend::ScriptExhausted& e) {
                memory_.record_warning(Phase::verification, std::string("treated as end_process: ") + e.what());
            } catch (const tools::SchemaError& e) {
                memory_.record_warning(Phase::verification, std::string("forced end_process rejected: ") + e.what());
            }
        }
        round.feedback_substituted = true;
        round.feedback.visual_difference = "verification incomplete";
        round.feedback.edit_suggestion = "The verifier ended without a review; compare the render with the target "
                                         "directly.";
    }

    const EpisodeTask& task_;
    const EpisodeConfig& cfg_;
    const EpisodeDeps& deps_;
    ContextMemory memory_;
    const memory::Prompts& prompts_;
    metrics::FallbackEmbedder fallback_;
    metrics::Embedder* embedder_;
    Trajectory traj_;
    std::string previous_source_;
    int lenient_counter_ = 0;
    bool plan_warned_ = false;
};

} // namespace

Trajectory run_episode(const EpisodeTask& task, const EpisodeConfig& config, const EpisodeDeps& deps,
                       int episode_index) {
    config.validate();
    EpisodeRunner runner(task, config, deps, episode_index);
    return runner.run();
}

Candidate select_best_candidate(const std::vector<Trajectory>& trajectories, const scene::Image& target,
                                metrics::Embedder& embedder) {
    const auto target_embedding = embedder.embed(target);
    std::optional<Candidate> best;
    for (const Trajectory& t : trajectories) {
        for (const auto& r : t.rounds) {
            if (!r.exec.success || r.exec.renders.empty()) continue;
            const double score = metrics::cosine(embedder.embed(r.exec.renders.front()), target_embedding);
            const bool better = !best || score > best->score ||
                                (score == best->score &&
                                 (t.episode < best->episode || (t.episode == best->episode && r.index > best->round)));
            if (better) best = Candidate{t.episode, r.index, r.exec.renders.front(), r.program, score};
        }
    }
    if (!best) throw NoCandidates("no successful round in any episode");
    return *best;
}

BestOfN run_best_of_n(const EpisodeTask& task, const EpisodeConfig& config, const BackendFactory& backends,
                      const EngineFactory& engines, tools::AssetProvider* assets, metrics::Embedder& embedder,
                      TrajectoryWriter* writer, Log log) {
    config.validate();
    if (task.targets.empty()) throw Error("best-of-N selection needs a target image");
    const int n = config.best_of;
    std::vector<std::optional<Trajectory>> results(static_cast<size_t>(n));
    std::vector<std::string> errors(static_cast<size_t>(n));
    std::mutex embed_mutex;

    // The embedder may be shared and stateful; per-round metrics in episodes
    // use their own fallback unless calls are serialised here.
    struct LockedEmbedder final : metrics::Embedder {
        metrics::Embedder& inner;
        std::mutex& m;
        LockedEmbedder(metrics::Embedder& e, std::mutex& mu) : inner(e), m(mu) {}
        std::vector<double> embed(const scene::Image& img) override {
            std::lock_guard lock(m);
            return inner.embed(img);
        }
        std::string name() const override { return inner.name(); }
    };

    auto run_one = [&](int i) {
        try {
            auto backend = backends(i);
            auto engine = engines(i);
            LockedEmbedder locked(embedder, embed_mutex);
            EpisodeDeps deps{*backend, *engine, assets, &locked, writer, nullptr, log};
            results[static_cast<size_t>(i)] = run_episode(task, config, deps, i);
            engine->shutdown();
        } catch (const EpisodeAborted& e) {
            errors[static_cast<size_t>(i)] = e.what();
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(i)] = e.what();
        }
    };

    const int jobs = std::min(config.jobs, n);
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < n; i = next++) run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    BestOfN out;
    for (int i = 0; i < n; ++i) {
        if (results[static_cast<size_t>(i)]) out.trajectories.push_back(std::move(*results[static_cast<size_t>(i)]));
        else out.failures.push_back(fmt::format("episode {}: {}", i, errors[static_cast<size_t>(i)]));
    }
    try {
        out.best = select_best_candidate(out.trajectories, task.targets.front(), embedder);
    } catch (const NoCandidates& e) {
        std::string msg = e.what();
        for (const auto& f : out.failures) msg += "; " + f;
        throw NoCandidates(msg);
    }
    if (writer) writer->write_selection(out.best, embedder.name());
    return out;
}

} // namespace sceneloop::agent
