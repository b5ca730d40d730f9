import json
import logging
import math
import os
import re

import numpy as np
import pandas as pd
import psutil


class AverageMeter:
    """Computes and stores the average and current value"""

    def __init__(self):
        self.reset()

    def reset(self):
        self.val = 0
        self.avg = 0
        self.sum = 0
        self.sq_sum = 0
        self.count = 0

    def update(self, val, n=1):
        self.val = val
        self.sum += val * n
        self.sq_sum += val * val * n
        self.count += n
        self.avg = self.sum / self.count

    def update_many(self, values):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return
        self.val = float(values[-1])
        self.sum += float(values.sum())
        self.sq_sum += float(np.dot(values, values))
        self.count += int(values.size)
        self.avg = self.sum / self.count

    @property
    def std_error(self):
        if self.count < 2:
            return float('nan')
        var = (self.sq_sum - self.count * self.avg ** 2) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)


def get_outdir(path, *paths, inc=False):
    outdir = os.path.join(path, *paths)
    if not os.path.exists(outdir):
        os.makedirs(outdir)
    elif inc:
        count = 1
        outdir_inc = outdir + '-' + str(count)
        while os.path.exists(outdir_inc):
            count = count + 1
            outdir_inc = outdir + '-' + str(count)
            assert count < 100
        outdir = outdir_inc
        os.makedirs(outdir)
    return outdir


def ensure_parent(filename):
    parent = os.path.dirname(os.path.abspath(filename))
    if parent:
        get_outdir(parent)
    return filename


def natural_key(string_):
    """See http://www.codinghorror.com/blog/archives/001018.html"""
    return [int(s) if s.isdigit() else s for s in re.split(r'(\d+)', string_.lower())]


def num_threads():
    """Worker cap for thread pools: SSOPT_THREADS if set, else the logical cpu count."""
    env = os.environ.get('SSOPT_THREADS')
    if env:
        try:
            n = int(env)
        except ValueError:
            logging.warning("Ignoring non-integer SSOPT_THREADS={!r}".format(env))
        else:
            return max(1, n)
    return max(1, psutil.cpu_count(logical=True) or 1)


def to_jsonable(obj):
    """Recursively convert results to JSON-safe values; non-finite floats become strings."""
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return obj


def from_json_float(value):
    if isinstance(value, str):
        if value in ('inf', 'Infinity'):
            return math.inf
        if value in ('-inf', '-Infinity'):
            return -math.inf
        if value == 'nan':
            return math.nan
    return float(value)


def write_json(obj, filename):
    ensure_parent(filename)
    with open(filename, 'w') as f:
        json.dump(to_jsonable(obj), f, indent=2)
    logging.info('Wrote {}'.format(filename))


def dump_csv(frame, f, header=None):
    """Write a DataFrame as CSV to an open file, preceded by '# {json}' when a header is given."""
    if header is not None:
        f.write('# {}\n'.format(json.dumps(to_jsonable(header))))
    frame.to_csv(f, index=False)


def write_csv(frame, filename, header=None):
    ensure_parent(filename)
    with open(filename, 'w', newline='') as f:
        dump_csv(frame, f, header)
    logging.info('Wrote {} rows to {}'.format(len(frame), filename))


def read_csv(filename):
    """Returns (header, frame) for a file written by write_csv; header is None when absent."""
    with open(filename) as f:
        first = f.readline()
    header = json.loads(first[2:]) if first.startswith('# ') else None
    return header, pd.read_csv(filename, comment='#')


class FormatterNoInfo(logging.Formatter):
    def __init__(self, fmt='%(levelname)s: %(message)s'):
        logging.Formatter.__init__(self, fmt)

    def format(self, record):
        if record.levelno == logging.INFO:
            return str(record.getMessage())
        return logging.Formatter.format(self, record)


def setup_default_logging(default_level=logging.INFO):
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(FormatterNoInfo())
    logging.root.addHandler(console_handler)
    logging.root.setLevel(default_level)
    return console_handler
