import os
from functools import partial
from multiprocessing import get_context
from typing import Any, Callable

import psutil
import tqdm

# Per-worker campaign, set in _init_worker (one copy per pool process).
campaign: Any


def _init_worker(payload: Any):
    global campaign
    campaign = payload


def _worker_task(run_index: int, task: Callable[[Any, int], Any]):
    return task(campaign, run_index)


def default_workers() -> int:
    """Physical core count, falling back to logical cores."""
    return psutil.cpu_count(logical=False) or os.cpu_count() or 1


class CampaignPool:
    """Parallel execution of Monte Carlo runs.

    A context manager around a spawn-context ``multiprocessing.Pool``. The
    campaign payload (base scenario, dispersion spec, master seed) is shipped
    once to every worker by the pool initializer; tasks only receive a run
    index. Results always come back in submission order, whatever the
    worker count.

    Tasks are top-level functions taking the payload and a run index:

    .. code-block:: python

        def miss_task(campaign, run_index):
            return run_one(campaign.master_seed, run_index, campaign.base, campaign.spec)

        with CampaignPool(campaign, num_workers=4) as pool:
            results = pool.map(miss_task, range(100), verbose=True)

    Args:
        payload: Picklable object handed to every task.
        num_workers(int | None): Number of processes. Defaults to the physical core count.
    """

    def __init__(self, payload: Any, num_workers: int | None = None):
        self.payload = payload
        self.num_workers = default_workers() if num_workers is None else num_workers
        self.mp_context = get_context("spawn")

    def __enter__(self):
        self.pool = self.mp_context.Pool(
            processes=self.num_workers,
            initializer=_init_worker,
            initargs=(self.payload,),
        )
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is not None:
            self.pool.terminate()
            self.pool.join()
            return
        try:
            self.pool.close()
            self.pool.join()
        except (KeyboardInterrupt, Exception):
            self.pool.terminate()
            self.pool.join()

    def map(
        self,
        task: Callable[[Any, int], Any],
        run_indices: list[int],
        verbose: bool = False,
    ) -> list:
        """Run ``task`` for every index, preserving order.

        Args:
            task(callable): Top-level function ``task(payload, run_index)``.
            run_indices(list[int]): Indices to run.
            verbose(bool): Show a progress bar. Defaults to False.

        Returns:
            list: One result per index, in the order given.
        """
        partial_task = partial(_worker_task, task=task)
        if not verbose:
            return self.pool.map(partial_task, run_indices)

        with tqdm.tqdm(total=len(run_indices), desc="Monte Carlo runs") as pbar:
            results = []
            for result in self.pool.imap(partial_task, run_indices):
                results.append(result)
                pbar.update()
            return results
