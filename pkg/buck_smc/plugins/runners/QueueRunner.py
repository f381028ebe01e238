"""
QueueRunner plugin
##################

QueueRunner plugin implements simple queue for jobs execution instead of starting
a thread per job.

Worker threads started only once and consume jobs from work queue, if one of the
jobs takes longer time to complete, threads do not stay idle and continue serving
other jobs. Used to run scenario suites, hyperparameter sweep cells and dataset
generation runs.

Each job runs on its own caller supplied arguments, results are collected in a
dictionary keyed by job name and returned in the order jobs were submitted,
hence results do not depend on the number of workers.

QueueRunner Sample Usage
========================

Run two scenarios using two worker threads::

    from buck_smc.plugins.runners import QueueRunner, run_scenario

    runner = QueueRunner(num_workers=2)
    traces = runner.run(
        {
            "classic": {"fun": run_scenario, "kwargs": {"scn": scn, "controller": smc}},
            "dnn": {"fun": run_scenario, "kwargs": {"scn": scn, "controller": dnn}},
        }
    )

QueueRunner Reference
=====================

.. autoclass:: buck_smc.plugins.runners.QueueRunner.QueueRunner
   :members:
"""
import logging
import threading
import queue

log = logging.getLogger(__name__)

LOCK = threading.Lock()


class QueueRunner:
    """
    QueueRunner run jobs using queue together with workers threads
    consuming work from work queue.

    Arguments:
        num_workers: number of threads to use
    """

    def __init__(self, num_workers: int = 1) -> None:
        self.num_workers = max(1, int(num_workers))

    def worker(self, work_q):
        while True:
            work_to_do = work_q.get()
            if work_to_do is None:
                break
            name, job, result, errors = work_to_do
            try:
                work_result = job["fun"](*job.get("args", []), **job.get("kwargs", {}))
                with LOCK:
                    result[name] = work_result
            except Exception as e:
                log.debug("buck-smc:QueueRunner job '{}' failed: {}".format(name, e))
                with LOCK:
                    errors[name] = e
            work_q.task_done()

    def run(self, jobs: dict) -> dict:
        """
        Execute jobs and return results.

        :param jobs: (dict) job name keyed dictionary of ``{"fun": callable,
            "args": list, "kwargs": dict}`` items
        :return: dictionary of job name to job return value in jobs order
        """
        work_q = queue.Queue()
        result, errors = {}, {}
        # enqueue jobs in work queue
        for name, job in jobs.items():
            work_q.put((name, job, result, errors))
        # start threads
        threads = []
        for i in range(min(self.num_workers, max(1, len(jobs)))):
            t = threading.Thread(target=self.worker, args=(work_q,), daemon=True)
            t.start()
            threads.append(t)
        # block until all jobs are done
        work_q.join()
        # stop workers:
        for t in threads:
            work_q.put(None)
        for t in threads:
            t.join()
        # re-raise first error in jobs order
        for name in jobs:
            if name in errors:
                raise errors[name]
        return {name: result[name] for name in jobs}
