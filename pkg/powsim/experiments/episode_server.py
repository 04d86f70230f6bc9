import json
import logging
import sys

from powsim.attack.episode import Episode
from powsim.attack.observation import Action, ExtendMode, Observation, Withhold
from powsim.config import SimConfig, attack_config, config_from_dict
from powsim.errors import ConfigError, SimulationError

logger = logging.getLogger(__name__)


def config_from_request(request: dict) -> SimConfig:
    if 'config' in request:
        return config_from_dict(request['config'])
    attack = dict(request.get('attack', {}))
    try:
        return attack_config(attack.pop('protocol', 'tailstorm'), float(attack.pop('alpha', 0.25)),
                             float(attack.pop('gamma', 0.5)), None, **attack)
    except TypeError as e:
        raise ConfigError("invalid attack parameters: {0}".format(e))


def action_from_request(request: dict) -> Action:
    try:
        return Action(Withhold(request['withhold']), ExtendMode(request.get('extend', 'inclusive')))
    except KeyError:
        raise ConfigError("step needs a withhold action")
    except ValueError as e:
        raise ConfigError(str(e))


def observation_to_dict(observation: Observation) -> dict:
    return observation._asdict()


class EpisodeServer:
    """Line-delimited JSON control of an Episode: one request per line, one
    reply per line. Failures are answered with an error object."""

    def __init__(self):
        self.episode = Episode()

    def handle(self, request: dict) -> dict:
        command = request.get('cmd')
        if command == 'reset':
            seed = request.get('seed')
            observation = self.episode.reset(config_from_request(request), None if seed is None else int(seed))
            return {'observation': observation_to_dict(observation), 'done': self.episode.done}
        if command == 'step':
            observation, reward, done = self.episode.step(action_from_request(request))
            return {'observation': observation_to_dict(observation), 'reward': reward, 'done': done}
        if command == 'close':
            return {'closed': True}
        raise ConfigError("unknown command: {0}".format(command))

    def serve(self, stdin=None, stdout=None):
        stdin = sys.stdin if stdin is None else stdin
        stdout = sys.stdout if stdout is None else stdout
        for line in stdin:
            if line.strip() == "":
                continue
            try:
                request = json.loads(line)
                if not isinstance(request, dict):
                    raise ConfigError("request must be a JSON object")
                reply = self.handle(request)
            except (json.JSONDecodeError, SimulationError) as e:
                logger.debug("request failed: %s", e)
                reply = {'error': str(e)}
            stdout.write(json.dumps(reply, sort_keys=True) + "\n")
            stdout.flush()
            if reply.get('closed'):
                break
