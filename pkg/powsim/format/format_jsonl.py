import json

from powsim.dag import Block, DagView
from powsim.io import DagFormat


def block_to_dict(data: Block) -> dict:
    return {
        'id': data.id,
        'parents': list(data.parents),
        'pow': data.pow,
        'miner': data.miner,
        'hash_value': data.hash_value,
        'summary': data.summary,
        'height': data.height,
        'depth': data.depth,
        'reified_at': data.reified_at,
    }


def dump_dag(view: DagView, stream):
    for block in view.blocks():
        stream.write(json.dumps(block_to_dict(block), sort_keys=True))
        stream.write("\n")


def read_dag_jsonl(filepath: str) -> list[dict]:
    with open(filepath, 'r') as stream:
        return [json.loads(line) for line in stream if line.strip()]


def write_dag_jsonl(filepath: str, view: DagView):
    with open(filepath, 'wt') as stream:
        dump_dag(view, stream)


DagFormatJSONL: DagFormat = ('.jsonl', read_dag_jsonl, write_dag_jsonl)
