from typing import NamedTuple, Optional

from powsim.attack.observation import Action, ExtendMode, Observation, Policy, Withhold
from powsim.errors import ConfigError


def policy_honest(obs: Observation) -> Action:
    if obs.h_d > obs.h_a:
        return Action(Withhold.ADOPT)
    return Action(Withhold.OVERRIDE)


def policy_get_ahead(obs: Observation) -> Action:
    if obs.h_d > obs.h_a:
        return Action(Withhold.ADOPT)
    if obs.h_d < obs.h_a:
        return Action(Withhold.OVERRIDE)
    return Action(Withhold.WAIT)


def policy_minor_delay(obs: Observation) -> Action:
    # heights are relative to the common summary, so h_d == 0 means the defenders have nothing new
    if obs.h_d > obs.h_a:
        return Action(Withhold.ADOPT)
    if obs.h_d == 0:
        return Action(Withhold.WAIT)
    return Action(Withhold.OVERRIDE)


def policy_sm1(obs: Observation) -> Action:
    if obs.h_d > obs.h_a:
        return Action(Withhold.ADOPT)
    if obs.h_d == obs.h_a == 1:
        return Action(Withhold.MATCH)
    if obs.h_d == obs.h_a - 1 and obs.h_d >= 1:
        return Action(Withhold.OVERRIDE)
    return Action(Withhold.WAIT)


class ThresholdPolicy(NamedTuple):
    """Cut-offs on the height lead and the private subblock tree.

    Rules are tried in order: adopt when behind by adopt_deficit, wait while the
    defenders are below min_defender_height, match ties up to match_max_height,
    override for leads in [override_min_lead, override_max_lead], else wait.
    """
    adopt_deficit: int = 1
    min_defender_height: int = 0
    match_max_height: int = 0
    override_min_lead: int = 0
    override_max_lead: Optional[int] = None
    exclusive_min_own: Optional[int] = None
    exclusive_min_depth: int = 0

    def withhold(self, obs: Observation) -> Withhold:
        lead = obs.h_a - obs.h_d
        if -lead >= self.adopt_deficit:
            return Withhold.ADOPT
        if obs.h_d < self.min_defender_height:
            return Withhold.WAIT
        if lead == 0 and 1 <= obs.h_d <= self.match_max_height:
            return Withhold.MATCH
        if lead >= self.override_min_lead and (self.override_max_lead is None or lead <= self.override_max_lead):
            return Withhold.OVERRIDE
        return Withhold.WAIT

    def extend(self, obs: Observation) -> ExtendMode:
        if self.exclusive_min_own is not None \
                and obs.s_a_excl >= self.exclusive_min_own \
                and obs.d_a_excl >= self.exclusive_min_depth:
            return ExtendMode.EXCLUSIVE
        return ExtendMode.INCLUSIVE

    def __call__(self, obs: Observation) -> Action:
        return Action(self.withhold(obs), self.extend(obs))


ThresholdHonest = ThresholdPolicy()
ThresholdGetAhead = ThresholdPolicy(override_min_lead=1)
ThresholdMinorDelay = ThresholdPolicy(min_defender_height=1)
ThresholdSM1 = ThresholdPolicy(min_defender_height=1, match_max_height=1, override_min_lead=1, override_max_lead=1)

policies: dict[str, Policy] = {
    'honest': policy_honest,
    'getahead': policy_get_ahead,
    'minordelay': policy_minor_delay,
    'sm1': policy_sm1,
}

threshold_policies: dict[str, ThresholdPolicy] = {
    'honest': ThresholdHonest,
    'getahead': ThresholdGetAhead,
    'minordelay': ThresholdMinorDelay,
    'sm1': ThresholdSM1,
}


def policy_from_name(name: str) -> Policy:
    policy = policies.get(name)
    if policy is None:
        raise ConfigError("unsupported policy: {0}".format(name))
    return policy
