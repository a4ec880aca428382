use pairanneal::bath::BathConfig;
use pairanneal::eigen::DEFAULT_GAP_TOL;
use pairanneal::master::Liouvillian;
use pairanneal::model::{
    ground_state, AnnealSchedule, AnnealingHamiltonian, DriverKind, Hamiltonian, ProblemInstance,
    SectorLabel,
};
use pairanneal::propagate::{convergence_check, integrate_closed, integrate_open, max_discrepancy};

fn schedule() -> AnnealSchedule {
    AnnealSchedule::standard(10.0, 1000.0).unwrap()
}

#[test]
fn closed_ancilla_run_follows_the_all_ones_block() {
    let inst = ProblemInstance::benchmark();
    let c = -0.5;
    let full = AnnealingHamiltonian::new(schedule(), &inst, DriverKind::Ancilla { c }).unwrap();
    let block = AnnealingHamiltonian::sector(schedule(), &inst, c, &SectorLabel::all_ones(2)).unwrap();
    let a = integrate_closed(&ground_state(&full.at(0.0)).unwrap(), &full, 1000.0, 0.02, 11).unwrap();
    let b = integrate_closed(&ground_state(&block.at(0.0)).unwrap(), &block, 1000.0, 0.02, 11).unwrap();
    let pa = a.physical_probabilities(2).unwrap();
    let pb: Vec<Vec<f64>> = b.states.iter().map(|s| s.probabilities()).collect();
    assert!(max_discrepancy(&pa, &pb) < 1e-6);
    assert!(pa.last().unwrap()[3] > 0.99);
}

#[test]
fn closed_run_converges_in_dt() {
    let inst = ProblemInstance::benchmark();
    let h = AnnealingHamiltonian::new(schedule(), &inst, DriverKind::Ancilla { c: -0.5 }).unwrap();
    let psi0 = ground_state(&h.at(0.0)).unwrap();
    let probabilities = |dt: f64| integrate_closed(&psi0, &h, 1000.0, dt, 21)?.physical_probabilities(2);
    let final_only = convergence_check(0.01, |dt| Ok(vec![probabilities(dt)?.pop().unwrap()])).unwrap();
    assert!(final_only < 1e-7, "{final_only}");
    // mid-anneal snapshots carry RK4 phase error on the small excited
    // admixture; it has to fall at close to fourth order
    let coarse = convergence_check(0.01, probabilities).unwrap();
    let fine = convergence_check(0.005, probabilities).unwrap();
    assert!(coarse < 1e-5, "{coarse}");
    assert!(fine < coarse / 8.0, "{coarse} -> {fine}");
}

#[test]
fn open_conventional_run_converges_in_dt() {
    let inst = ProblemInstance::benchmark();
    let bath = BathConfig::uniform(2, 0.1, 0.0).unwrap();
    let l = Liouvillian::full(schedule(), &inst, DriverKind::Conventional, &bath, DEFAULT_GAP_TOL).unwrap();
    let rho0 = ground_state(&l.hamiltonian().at(0.0)).unwrap().projector();
    let gap = convergence_check(0.01, |dt| {
        let traj = integrate_open(&rho0, &l, 1000.0, dt, 11)?;
        assert!(traj.min_eigenvalue() > -1e-6);
        traj.physical_probabilities(2)
    })
    .unwrap();
    assert!(gap < 1e-5, "{gap}");
}

#[test]
fn longitudinal_noise_degrades_the_conventional_driver_only() {
    let inst = ProblemInstance::benchmark();
    let run = |driver: DriverKind, gz: f64| {
        let bath = BathConfig::uniform(driver.register_qubits(2), gz, 0.0).unwrap();
        let l = Liouvillian::full(schedule(), &inst, driver, &bath, DEFAULT_GAP_TOL).unwrap();
        let rho0 = ground_state(&l.hamiltonian().at(0.0)).unwrap().projector();
        let traj = integrate_open(&rho0, &l, 1000.0, 0.02, 2).unwrap();
        assert!(traj.worst_norm_deviation() < 1e-6);
        traj.physical_probabilities(2).unwrap()[1][3]
    };
    let conventional = run(DriverKind::Conventional, 0.1);
    assert!(conventional < 0.99, "{conventional}");
    let ancilla = run(DriverKind::Ancilla { c: -0.5 }, 0.1);
    assert!(ancilla > 0.99, "{ancilla}");
}
