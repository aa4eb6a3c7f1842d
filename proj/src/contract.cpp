#include "promo/contract.hpp"

namespace promo {

ArmAction contract_action(const WorkerModel& model, const IndexTable& table, int quit_state,
                          int id) {
    (void)model;
    // at a new minimum the quit test comes first, so a threshold that
    // collapsed onto m below the quit boundary dismisses rather than promotes
    const AugState s = table.aug.state(id);
    if (s.x == s.m && s.m <= quit_state) return ArmAction::quit;
    if (table.aug.promoted(id)) return ArmAction::promote;
    return ArmAction::cont;
}

double SingleArmContract::worker_value(int x, int m) const {
    const int id = aug.id(x, m);
    if (id < 0) throw std::out_of_range("contract does not reach this state");
    return worker(id);
}

double SingleArmContract::principal_at(int x, int m) const {
    const int id = aug.id(x, m);
    if (id < 0) throw std::out_of_range("contract does not reach this state");
    return principal(id);
}

SingleArmContract single_arm_contract(const WorkerModel& model, const IndexTable& table, double W) {
    if (W < 0) throw std::invalid_argument("outside option must be nonnegative");
    SingleArmContract c;
    c.quit_state = quit_boundary(table, W);
    c.threshold = model.threshold;
    c.aug = table.aug;
    const int n = c.aug.size();
    const Discount& d = model.disc;
    const WorkerSpec& spec = model.spec;

    c.action.resize(n);
    std::vector<Triplet> t;
    Mat rhs = Mat::Zero(n, 2);
    for (int id = 0; id < n; ++id) {
        const AugState s = c.aug.state(id);
        c.action[id] = contract_action(model, table, c.quit_state, id);
        t.emplace_back(id, id, 1.0);
        switch (c.action[id]) {
        case ArmAction::promote:
            rhs(id, 0) = model.perp(s.x);
            rhs(id, 1) = spec.prize;
            break;
        case ArmAction::quit:
            rhs(id, 0) = W;
            break;
        case ArmAction::cont:
            rhs(id, 0) = spec.pi(s.x) * d.weight;
            rhs(id, 1) = -spec.cost(s.x) * d.weight;
            for (SpMat::InnerIterator it(c.aug.kernel(), id); it; ++it)
                t.emplace_back(id, int(it.col()), -d.beta * it.value());
            break;
        }
    }
    SpMat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    const Mat V = sparse_solve(A, rhs);
    c.principal = V.col(0);
    c.worker = V.col(1);

    const int root = c.aug.id(spec.initial, spec.initial);
    c.principal_value = c.principal(root);
    c.quits_at_start = c.action[root] == ArmAction::quit;
    c.degenerate = c.action[root] == ArmAction::promote;
    return c;
}

} // namespace promo
