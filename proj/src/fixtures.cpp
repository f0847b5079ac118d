#include <stdexcept>
#include <string>

#include "fairmatch/harness.hpp"

namespace fairmatch {

Instance make_hardness_group_instance(int horizon) {
  if (horizon < 3 || horizon % 3 != 0) {
    throw std::invalid_argument("group hardness fixture needs a positive horizon divisible by 3, got " +
                                std::to_string(horizon));
  }
  // Column of the single 1 in row i of w^U and w^V (w^O is the identity).
  constexpr int kOffCol[3] = {2, 0, 1};
  constexpr int kOnCol[3] = {1, 2, 0};
  Instance inst;
  inst.arrival_model = ArrivalModel::Kiid;
  inst.horizon = horizon;
  inst.groups = {"u1", "u2", "u3", "v1", "v2", "v3"};
  for (int i = 0; i < 3; ++i) {
    inst.offline.push_back({i, i, 1});
    OnlineType v;
    v.id = i;
    v.group = 3 + i;
    v.patience = 1;
    v.p = 1.0 / 3.0;
    inst.online.push_back(v);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Edge e;
      e.u = i;
      e.v = j;
      e.success_prob = 1.0;
      e.w_op = i == j ? 1.0 : 0.0;
      e.w_off = kOffCol[i] == j ? 1.0 : 0.0;
      e.w_on = kOnCol[i] == j ? 1.0 : 0.0;
      inst.edges.push_back(e);
    }
  }
  return inst;
}

Instance make_hardness_indiv_group_instance(double L, Side side) {
  if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
  Instance inst;
  inst.groups = {"drivers", "riders"};
  if (side == Side::Offline) {
    inst.arrival_model = ArrivalModel::Kiid;
    inst.horizon = 1;
    inst.offline = {{0, 0, 1}, {1, 0, 1}};
    OnlineType v;
    v.group = 1;
    v.p = 1.0;
    inst.online.push_back(v);
    inst.edges.push_back({0, 0, 1.0, 1.0, 1.0, 1.0});
    inst.edges.push_back({1, 0, 1.0, 1.0, L, 1.0});
  } else {
    inst.arrival_model = ArrivalModel::Kad;
    inst.horizon = 2;
    inst.offline = {{0, 0, 1}};
    for (int t = 0; t < 2; ++t) {
      OnlineType v;
      v.id = t;
      v.group = 1;
      v.p_t = {t == 0 ? 1.0 : 0.0, t == 1 ? 1.0 : 0.0};
      inst.online.push_back(v);
    }
    inst.edges.push_back({0, 0, 1.0, 1.0, 1.0, 1.0});
    inst.edges.push_back({0, 1, 1.0, 1.0, 1.0, L});
  }
  return inst;
}

}  // namespace fairmatch
