#include "golden.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ttu/sched_proto.hpp"

namespace oracle {

using namespace ttu;

std::string scheduled_bundle_happy_trace() {
  TraceLog log;
  BundleSwitch sw;
  sw.set_trace(&log);
  sw.handle(msg::Open{7}, SimTime{100});
  sw.handle(msg::Add{7, Command{"flow_mod table=0 match=f1 out=2"}}, SimTime{110});
  sw.handle(msg::Add{7, Command{"flow_mod table=0 match=f2 out=1"}}, SimTime{120});
  sw.handle(msg::Close{7}, SimTime{130});
  sw.handle(msg::Commit{7, SimTime{1000}}, SimTime{140});
  sw.execute_due(SimTime{999});
  sw.execute_due(SimTime{1000});
  return log.str();
}

std::string scheduled_bundle_discard_trace() {
  TraceLog log;
  BundleSwitch sw;
  sw.set_trace(&log);
  sw.handle(msg::Open{8}, SimTime{100});
  sw.handle(msg::Add{8, Command{"flow_mod table=0 match=f1 out=2"}}, SimTime{110});
  sw.handle(msg::Close{8}, SimTime{130});
  sw.handle(msg::Commit{8, SimTime{1000}}, SimTime{140});
  sw.handle(msg::Discard{8}, SimTime{500});
  sw.execute_due(SimTime{1000});
  sw.handle(msg::Discard{8}, SimTime{1100});
  sw.handle(msg::Open{9}, SimTime{1200});
  sw.handle(msg::Add{9, Command{"flow_mod table=0 match=f1 out=3"}}, SimTime{1210});
  sw.handle(msg::Close{9}, SimTime{1220});
  sw.handle(msg::Commit{9, std::nullopt}, SimTime{1230});
  sw.handle(msg::Discard{9}, SimTime{1240});
  return log.str();
}

std::string read_golden(const std::string& name) {
  const std::string path = std::string(TTU_GOLDEN_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace oracle
