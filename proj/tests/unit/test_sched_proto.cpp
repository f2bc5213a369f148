#include <gtest/gtest.h>

#include "bundle_fuzz.hpp"
#include "golden.hpp"
#include "ttu/sched_proto.hpp"

using namespace ttu;

namespace {

std::vector<Command> cmds(int n) {
  std::vector<Command> out;
  for (int i = 0; i < n; ++i) out.push_back(Command{"cmd" + std::to_string(i)});
  return out;
}

BundleSwitch closed_bundle(BundleId id, int n, SimTime now = SimTime{0}) {
  BundleSwitch sw;
  sw.handle(msg::Open{id}, now);
  for (const auto& c : cmds(n)) sw.handle(msg::Add{id, c}, now);
  sw.handle(msg::Close{id}, now);
  return sw;
}

}  // namespace

TEST(SwitchHandle, ScheduledCommitIsPending) {
  auto sw = closed_bundle(1, 2, SimTime{50});
  const auto r = switch_handle(sw, msg::Commit{1, SimTime{60}}, SimTime{50});
  EXPECT_TRUE(r.reply.ok());
  EXPECT_TRUE(r.executed.empty());
  const auto* b = sw.bundle(1);
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->phase, BundlePhase::CommittedPending);
  EXPECT_EQ(b->staged.size(), 2u);
  EXPECT_EQ(sw.next_due(), SimTime{60});
  EXPECT_EQ(sw.pending(), 1u);
}

TEST(SwitchHandle, CommitWithoutTimeExecutesNow) {
  auto sw = closed_bundle(1, 2);
  const auto r = sw.handle(msg::Commit{1, std::nullopt}, SimTime{77});
  ASSERT_EQ(r.executed.size(), 2u);
  EXPECT_EQ(r.executed[0].at, SimTime{77});
  EXPECT_EQ(r.executed[0].command.text, "cmd0");
  EXPECT_EQ(r.executed[1].command.text, "cmd1");
  EXPECT_EQ(sw.bundle(1)->phase, BundlePhase::Executed);
  EXPECT_EQ(sw.bundle(1)->executed_at, SimTime{77});
}

TEST(SwitchHandle, DiscardAfterExecutionRefused) {
  auto sw = closed_bundle(1, 1);
  sw.handle(msg::Commit{1, std::nullopt}, SimTime{5});
  const auto r = sw.handle(msg::Discard{1}, SimTime{6});
  EXPECT_EQ(r.reply.error, Errc::AlreadyExecuted);
  EXPECT_EQ(sw.bundle(1)->phase, BundlePhase::Executed);
}

TEST(SwitchHandle, StateErrorsLeaveStateUnchanged) {
  BundleSwitch sw;
  EXPECT_EQ(sw.handle(msg::Add{1, Command{"x"}}, SimTime{}).reply.error, Errc::BundleStateError);
  EXPECT_EQ(sw.handle(msg::Close{1}, SimTime{}).reply.error, Errc::BundleStateError);
  EXPECT_EQ(sw.handle(msg::Commit{1, std::nullopt}, SimTime{}).reply.error, Errc::BundleStateError);
  EXPECT_EQ(sw.handle(msg::Discard{1}, SimTime{}).reply.error, Errc::BundleStateError);
  EXPECT_EQ(sw.bundle(1), nullptr);

  sw.handle(msg::Open{1}, SimTime{});
  EXPECT_EQ(sw.handle(msg::Open{1}, SimTime{}).reply.error, Errc::DuplicateBundle);
  EXPECT_EQ(sw.handle(msg::Commit{1, SimTime{5}}, SimTime{}).reply.error, Errc::BundleStateError);
  sw.handle(msg::Close{1}, SimTime{});
  EXPECT_EQ(sw.handle(msg::Add{1, Command{"late"}}, SimTime{}).reply.error, Errc::BundleStateError);
  EXPECT_TRUE(sw.bundle(1)->staged.empty());
  EXPECT_EQ(sw.handle(msg::Commit{1, SimTime{9}}, SimTime{10}).reply.error, Errc::SchedulePastError);
  EXPECT_EQ(sw.bundle(1)->phase, BundlePhase::Closed);
  EXPECT_TRUE(sw.handle(msg::Commit{1, SimTime{10}}, SimTime{10}).reply.ok());
}

TEST(SwitchHandle, DiscardedIdCannotBeReopened) {
  BundleSwitch sw;
  sw.handle(msg::Open{3}, SimTime{});
  EXPECT_TRUE(sw.handle(msg::Discard{3}, SimTime{}).reply.ok());
  EXPECT_EQ(sw.handle(msg::Open{3}, SimTime{}).reply.error, Errc::DuplicateBundle);
  EXPECT_EQ(sw.handle(msg::Discard{3}, SimTime{}).reply.error, Errc::BundleStateError);
}

TEST(ExecuteDue, BoundaryIsInclusive) {
  auto sw = closed_bundle(1, 1);
  sw.handle(msg::Commit{1, SimTime{100}}, SimTime{0});
  EXPECT_TRUE(execute_due(sw, SimTime{99}).empty());
  EXPECT_EQ(sw.bundle(1)->phase, BundlePhase::CommittedPending);
  const auto ex = execute_due(sw, SimTime{100});
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].at, SimTime{100});
}

TEST(ExecuteDue, OrdersBundlesByScheduledTime) {
  BundleSwitch sw;
  for (BundleId id : {1u, 2u}) {
    sw.handle(msg::Open{id}, SimTime{});
    sw.handle(msg::Add{id, Command{"a" + std::to_string(id)}}, SimTime{});
    sw.handle(msg::Add{id, Command{"b" + std::to_string(id)}}, SimTime{});
    sw.handle(msg::Close{id}, SimTime{});
  }
  sw.handle(msg::Commit{1, SimTime{30}}, SimTime{});
  sw.handle(msg::Commit{2, SimTime{20}}, SimTime{});
  const auto ex = sw.execute_due(SimTime{40});
  ASSERT_EQ(ex.size(), 4u);
  EXPECT_EQ(ex[0].command.text, "a2");
  EXPECT_EQ(ex[1].command.text, "b2");
  EXPECT_EQ(ex[2].command.text, "a1");
  EXPECT_EQ(ex[3].command.text, "b1");
  EXPECT_EQ(ex[0].at, SimTime{20});
  EXPECT_EQ(ex[2].at, SimTime{30});
  EXPECT_TRUE(sw.execute_due(SimTime{40}).empty());
}

TEST(ExecuteDue, LatencySharedByOneBundle) {
  BundleSwitch sw(delay::Uniform{Duration{5}, Duration{50}}, 3);
  sw.handle(msg::Open{1}, SimTime{});
  for (const auto& c : cmds(3)) sw.handle(msg::Add{1, c}, SimTime{});
  sw.handle(msg::Close{1}, SimTime{});
  sw.handle(msg::Commit{1, SimTime{100}}, SimTime{});
  const auto ex = sw.execute_due(SimTime{100});
  ASSERT_EQ(ex.size(), 3u);
  EXPECT_GE(ex[0].at, SimTime{105});
  EXPECT_LE(ex[0].at, SimTime{150});
  EXPECT_EQ(ex[1].at, ex[0].at);
  EXPECT_EQ(ex[2].at, ex[0].at);
}

TEST(ExecuteDue, DiscardedBundleNeverRuns) {
  auto sw = closed_bundle(1, 2);
  sw.handle(msg::Commit{1, SimTime{10}}, SimTime{});
  EXPECT_TRUE(sw.handle(msg::Discard{1}, SimTime{5}).reply.ok());
  EXPECT_TRUE(sw.execute_due(SimTime{1'000}).empty());
  EXPECT_EQ(sw.bundle(1)->phase, BundlePhase::Discarded);
  EXPECT_TRUE(sw.bundle(1)->staged.empty());
}

TEST(Controller, MessageCountsAndOrder) {
  BundleController c(5);
  const auto one = c.build_scheduled_bundle(cmds(1), SimTime{9});
  EXPECT_EQ(one.size(), 4u);
  const auto three = c.build_scheduled_bundle(cmds(3), SimTime{9});
  ASSERT_EQ(three.size(), 6u);
  const char* kinds[] = {"OPEN", "ADD", "ADD", "ADD", "CLOSE", "COMMIT"};
  for (std::size_t i = 0; i < three.size(); ++i) {
    EXPECT_EQ(kind_of(three[i]), kinds[i]);
    EXPECT_EQ(bundle_of(three[i]), 6u);
  }
  EXPECT_EQ(bundle_of(one[0]), 5u);
  EXPECT_EQ(c.peek_next_id(), 7u);
}

TEST(Controller, EmptyBundleRejected) {
  BundleController c;
  try {
    c.build_scheduled_bundle({}, SimTime{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyBundle);
  }
  EXPECT_EQ(c.peek_next_id(), 1u);
}

TEST(Controller, ReplayReachesCommittedPending) {
  BundleController c;
  BundleSwitch sw;
  const auto msgs = c.build_scheduled_bundle(cmds(3), SimTime{500});
  for (const auto& m : msgs) ASSERT_TRUE(sw.handle(m, SimTime{100}).reply.ok());
  const auto* b = sw.bundle(bundle_of(msgs[0]));
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->phase, BundlePhase::CommittedPending);
  EXPECT_EQ(b->staged, cmds(3));
}

TEST(RpcDispatch, IdealServerRunsAtScheduledTime) {
  RpcServer s(ServerModel{});
  const auto out = rpc_dispatch(s, ScheduledRpc{1, Command{"x"}, SimTime{1100}, true}, SimTime{1000});
  EXPECT_TRUE(out.reply.ok());
  EXPECT_EQ(out.reply.execution_time, SimTime{1100});
  EXPECT_EQ(out.actual_start, SimTime{1100});
}

TEST(RpcDispatch, ImmediateReportsCompletion) {
  RpcServer s(ServerModel{delay::Constant{}, delay::Constant{Duration{250}}});
  const auto out = s.dispatch(ScheduledRpc{2, Command{"x"}, std::nullopt, true}, SimTime{1000});
  EXPECT_EQ(out.reply.execution_time, SimTime{1250});
  EXPECT_EQ(out.completion, SimTime{1250});
}

TEST(RpcDispatch, NoTimeWithoutGetTime) {
  RpcServer s(ServerModel{});
  EXPECT_FALSE(s.dispatch(ScheduledRpc{3, Command{"x"}, SimTime{5}, false}, SimTime{0}).reply.execution_time);
}

TEST(RpcDispatch, LateStartAndStaleness) {
  RpcServer s(ServerModel{}, 0, Duration{100});
  const auto late = s.dispatch(ScheduledRpc{4, Command{"x"}, SimTime{950}, true}, SimTime{1000});
  EXPECT_TRUE(late.reply.ok());
  EXPECT_EQ(late.actual_start, SimTime{1000});
  const auto stale = s.dispatch(ScheduledRpc{5, Command{"x"}, SimTime{899}, true}, SimTime{1000});
  EXPECT_EQ(stale.reply.status, Errc::RpcTooLate);
  EXPECT_FALSE(stale.reply.execution_time);
}

TEST(RpcDispatch, ReportingFaultShiftsOnlyTheReport) {
  RpcServer s(ServerModel{delay::Constant{}, delay::Constant{Duration{10}}, 1.0, Duration{1000}});
  const auto out = s.dispatch(ScheduledRpc{6, Command{"x"}, SimTime{100}, true}, SimTime{0});
  EXPECT_TRUE(out.report_faulted);
  EXPECT_EQ(out.completion, SimTime{110});
  EXPECT_EQ(out.reply.execution_time, SimTime{1110});
}

TEST(Golden, HappyPathTrace) {
  EXPECT_EQ(oracle::scheduled_bundle_happy_trace(), oracle::read_golden("scheduled_bundle_happy.trace"));
}

TEST(Golden, DiscardPathTrace) {
  EXPECT_EQ(oracle::scheduled_bundle_discard_trace(), oracle::read_golden("scheduled_bundle_discard.trace"));
}

TEST(Golden, TraceLinesParseBack) {
  const auto text = oracle::read_golden("scheduled_bundle_discard.trace");
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl - pos);
    EXPECT_EQ(format(parse_trace_line(line)), line);
    pos = nl + 1;
  }
  EXPECT_THROW(parse_trace_line("12 sideways OPEN 1 -"), Error);
  EXPECT_THROW(parse_trace_line("12 local OPEN"), Error);
}

TEST(BundleFuzz, TenThousandSequencesAgreeWithModel) {
  const auto s = oracle::run_bundle_fuzz(1, 10'000);
  EXPECT_EQ(s.sequences, 10'000u);
  EXPECT_GT(s.executions, 0u);
  EXPECT_EQ(s.discarded_executed, 0u);
  EXPECT_EQ(s.executed_discarded, 0u);
  EXPECT_EQ(s.out_of_order, 0u);
  EXPECT_EQ(s.model_mismatches, 0u);
  EXPECT_EQ(s.idempotence_failures, 0u);
}
